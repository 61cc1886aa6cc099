#include "hiersal/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "hiersal/errors.hpp"

namespace hiersal {

double merge_similarity(long long area_i, const Lab& mean_i, long long area_j, const Lab& mean_j) {
    return static_cast<double>(std::min(area_i, area_j)) * lab_distance(mean_i, mean_j);
}

namespace {

struct QueueEntry {
    double sim;
    int i; // i < j
    int j;
};

struct QueueOrder {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.sim != b.sim) return a.sim > b.sim; // min-heap
        if (a.i != b.i) return a.i > b.i;
        return a.j > b.j;
    }
};

double center_distance(int x, int y, int width, int height) {
    double dx = x + 0.5 - width / 2.0;
    double dy = y + 0.5 - height / 2.0;
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace

Hierarchy build_bpt(const Partition& p0) {
    if (p0.regions.empty()) throw RangeError("build_bpt: empty partition");
    const int n_leaves = static_cast<int>(p0.regions.size());
    const int n_nodes = 2 * n_leaves - 1;

    Hierarchy h;
    h.width = p0.width;
    h.height = p0.height;
    h.n_leaves = n_leaves;
    h.leaf_labels = p0.labels;
    h.nodes.resize(n_nodes);
    h.merges.reserve(n_leaves - 1);

    std::vector<std::map<int, long long>> contacts(n_nodes);
    std::vector<bool> alive(n_nodes, false);

    for (int i = 0; i < n_leaves; ++i) {
        const Region& r = p0.regions[i];
        HierarchyNode& nd = h.nodes[i];
        nd.id = i;
        nd.area = r.area;
        nd.sum_x = r.sum_x;
        nd.sum_y = r.sum_y;
        nd.sum_lab = r.sum_lab;
        nd.perimeter = r.perimeter;
        nd.border_len = r.border_len;
        contacts[i] = r.neighbor_contact;
        alive[i] = true;
    }
    for (int y = 0; y < p0.height; ++y)
        for (int x = 0; x < p0.width; ++x)
            h.nodes[p0.label(x, y)].center_dist_sum += center_distance(x, y, p0.width, p0.height);

    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue;
    auto push_pair = [&](int i, int j) {
        if (i > j) std::swap(i, j);
        double sim = merge_similarity(h.nodes[i].area, h.nodes[i].mean_lab(), h.nodes[j].area,
                                      h.nodes[j].mean_lab());
        queue.push({sim, i, j});
    };
    for (int i = 0; i < n_leaves; ++i)
        for (const auto& [j, len] : contacts[i])
            if (i < j) push_pair(i, j);

    int next_id = n_leaves;
    while (next_id < n_nodes) {
        QueueEntry e = queue.top();
        queue.pop();
        if (!alive[e.i] || !alive[e.j]) continue; // stale entry

        int c = next_id++;
        h.merges.push_back({e.i, e.j, c});
        HierarchyNode& nd = h.nodes[c];
        const HierarchyNode& a = h.nodes[e.i];
        const HierarchyNode& b = h.nodes[e.j];
        nd.id = c;
        nd.left = e.i;
        nd.right = e.j;
        nd.area = a.area + b.area;
        nd.sum_x = a.sum_x + b.sum_x;
        nd.sum_y = a.sum_y + b.sum_y;
        nd.sum_lab = a.sum_lab + b.sum_lab;
        nd.border_len = a.border_len + b.border_len;
        nd.perimeter = a.perimeter + b.perimeter - 2 * contacts[e.i][e.j];
        nd.center_dist_sum = a.center_dist_sum + b.center_dist_sum;
        h.nodes[e.i].parent = c;
        h.nodes[e.j].parent = c;
        alive[e.i] = alive[e.j] = false;
        alive[c] = true;

        std::map<int, long long> merged = std::move(contacts[e.i]);
        merged.erase(e.j);
        for (const auto& [n, len] : contacts[e.j])
            if (n != e.i) merged[n] += len;
        contacts[e.j].clear();
        for (const auto& [n, len] : merged) {
            contacts[n].erase(e.i);
            contacts[n].erase(e.j);
            contacts[n][c] = len;
            push_pair(n, c);
        }
        contacts[c] = std::move(merged);
    }
    return h;
}

namespace {

// Node alive after the first `applied` merges of h.
inline bool node_live(const Hierarchy& h, int id, int applied) {
    if (id >= h.n_leaves + applied) return false;
    int parent = h.nodes[id].parent;
    return parent == -1 || parent >= h.n_leaves + applied;
}

std::vector<int> live_ancestors(const Hierarchy& h, int applied) {
    const int limit = h.n_leaves + applied;
    std::vector<int> live(limit, -1);
    for (int id = limit - 1; id >= 0; --id) {
        int parent = h.nodes[id].parent;
        live[id] = (parent == -1 || parent >= limit) ? id : live[parent];
    }
    return live;
}

} // namespace

Partition partition_at(const Hierarchy& h, int n_regions) {
    if (n_regions < 1 || n_regions > h.n_leaves)
        throw RangeError("partition_at: region count out of bounds");
    const int applied = h.n_leaves - n_regions;
    std::vector<int> live = live_ancestors(h, applied);

    std::vector<int> live_ids;
    for (int id = 0; id < h.n_leaves + applied; ++id)
        if (node_live(h, id, applied)) live_ids.push_back(id);

    std::vector<int> index(h.n_leaves + applied, -1);
    for (std::size_t i = 0; i < live_ids.size(); ++i) index[live_ids[i]] = static_cast<int>(i);

    std::vector<int> labels(h.leaf_labels.size());
    for (std::size_t p = 0; p < labels.size(); ++p) labels[p] = index[live[h.leaf_labels[p]]];

    Partition part =
        partition_from_labels(h.width, h.height, std::move(labels), static_cast<int>(live_ids.size()));
    for (std::size_t i = 0; i < live_ids.size(); ++i) {
        part.regions[i].node_id = live_ids[i];
        part.regions[i].sum_lab = h.nodes[live_ids[i]].sum_lab;
    }
    return part;
}

Hierarchy cut_subhierarchy(const Hierarchy& h, int n_regions) {
    if (n_regions < 1 || n_regions > h.n_leaves)
        throw RangeError("cut_subhierarchy: region count out of bounds");
    const int applied = h.n_leaves - n_regions;
    std::vector<int> live = live_ancestors(h, applied);

    std::vector<int> remap(h.n_nodes(), -1);
    std::vector<int> live_ids;
    for (int id = 0; id < h.n_leaves + applied; ++id)
        if (node_live(h, id, applied)) {
            remap[id] = static_cast<int>(live_ids.size());
            live_ids.push_back(id);
        }

    Hierarchy out;
    out.width = h.width;
    out.height = h.height;
    out.n_leaves = n_regions;
    out.nodes.resize(2 * n_regions - 1);
    out.merges.reserve(n_regions - 1);

    out.leaf_labels.resize(h.leaf_labels.size());
    for (std::size_t p = 0; p < out.leaf_labels.size(); ++p)
        out.leaf_labels[p] = remap[live[h.leaf_labels[p]]];

    for (int i = 0; i < n_regions; ++i) {
        out.nodes[i] = h.nodes[live_ids[i]];
        out.nodes[i].id = i;
        out.nodes[i].left = out.nodes[i].right = out.nodes[i].parent = -1;
    }
    int next = n_regions;
    for (std::size_t t = applied; t < h.merges.size(); ++t) {
        const Merge& m = h.merges[t];
        int c = next++;
        remap[m.node] = c;
        out.merges.push_back({remap[m.left], remap[m.right], c});
        out.nodes[c] = h.nodes[m.node];
        out.nodes[c].id = c;
        out.nodes[c].left = remap[m.left];
        out.nodes[c].right = remap[m.right];
        out.nodes[c].parent = -1;
        out.nodes[remap[m.left]].parent = c;
        out.nodes[remap[m.right]].parent = c;
    }
    return out;
}

namespace {

// threshold rule: sub-threshold pixels seed regions; t == 0 keeps only
// zero-strength pixels so the finest partition is still defined
inline bool below_threshold(double v, double t) { return t > 0.0 ? v < t : v <= 0.0; }

// Raster-order compaction of arbitrary labels, -1 entries preserved.
int compact_labels(std::vector<int>& labels) {
    std::map<int, int> remap;
    for (int& l : labels) {
        if (l < 0) continue;
        auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
        l = it->second;
    }
    return static_cast<int>(remap.size());
}

// Attach unlabeled pixels layer by layer to the lowest-id adjacent region.
void assign_boundary_pixels(int width, int height, std::vector<int>& labels) {
    for (;;) {
        bool unassigned = false;
        std::vector<std::pair<std::size_t, int>> updates;
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                std::size_t p = static_cast<std::size_t>(y) * width + x;
                if (labels[p] != -1) continue;
                unassigned = true;
                int best = -1;
                auto look = [&](int nx, int ny) {
                    int l = labels[static_cast<std::size_t>(ny) * width + nx];
                    if (l != -1 && (best == -1 || l < best)) best = l;
                };
                if (x > 0) look(x - 1, y);
                if (x + 1 < width) look(x + 1, y);
                if (y > 0) look(x, y - 1);
                if (y + 1 < height) look(x, y + 1);
                if (best != -1) updates.emplace_back(p, best);
            }
        }
        if (!unassigned) return;
        if (updates.empty()) return; // isolated pixels with no labeled neighbor anywhere
        for (auto& [p, l] : updates) labels[p] = l;
    }
}

std::vector<int> threshold_components(const GrayMap& map, double t) {
    const int w = map.width, h = map.height;
    const std::size_t n = map.pixel_count();
    std::vector<int> labels(n, -1);

    bool any_seed = false;
    for (std::size_t i = 0; i < n; ++i)
        if (below_threshold(map.data[i], t)) any_seed = true;
    if (!any_seed) {
        std::fill(labels.begin(), labels.end(), 0);
        return labels;
    }

    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (labels[start] != -1 || !below_threshold(map.data[start], t)) continue;
        labels[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            std::size_t p = stack.back();
            stack.pop_back();
            int x = static_cast<int>(p % w);
            int y = static_cast<int>(p / w);
            auto visit = [&](int nx, int ny) {
                std::size_t q = static_cast<std::size_t>(ny) * w + nx;
                if (labels[q] == -1 && below_threshold(map.data[q], t)) {
                    labels[q] = next;
                    stack.push_back(q);
                }
            };
            if (x > 0) visit(x - 1, y);
            if (x + 1 < w) visit(x + 1, y);
            if (y > 0) visit(x, y - 1);
            if (y + 1 < h) visit(x, y + 1);
        }
        ++next;
    }
    assign_boundary_pixels(w, h, labels);
    return labels;
}

} // namespace

Partition ucm_partition(const GrayMap& ucm, double threshold) {
    bool contour_grid = ucm.width >= 3 && ucm.height >= 3 && ucm.width % 2 == 1 && ucm.height % 2 == 1;
    return ucm_partition(ucm, threshold, contour_grid);
}

Partition ucm_partition(const GrayMap& ucm, double threshold, bool contour_grid) {
    if (threshold < 0.0) throw RangeError("ucm threshold must be >= 0");
    if (!contour_grid) {
        std::vector<int> labels = threshold_components(ucm, threshold);
        int count = compact_labels(labels);
        return partition_from_labels(ucm.width, ucm.height, std::move(labels), count);
    }
    if (ucm.width < 3 || ucm.height < 3 || ucm.width % 2 == 0 || ucm.height % 2 == 0)
        throw DimensionError("contour-grid ucm must be (2w+1)x(2h+1)");
    const int w = (ucm.width - 1) / 2;
    const int h = (ucm.height - 1) / 2;
    std::vector<int> grid_labels = threshold_components(ucm, threshold);
    std::vector<int> labels(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            labels[static_cast<std::size_t>(y) * w + x] =
                grid_labels[static_cast<std::size_t>(2 * y + 1) * ucm.width + (2 * x + 1)];
    int count = compact_labels(labels);
    return partition_from_labels(w, h, std::move(labels), count);
}

std::vector<int> geometric_targets(int k_levels, int n_first, int n_last) {
    if (k_levels < 2) throw RangeError("k_levels must be >= 2");
    if (n_last < 1 || n_first < n_last) throw RangeError("need n_first >= n_last >= 1");
    std::vector<int> targets;
    double ratio = static_cast<double>(n_last) / n_first;
    for (int j = 0; j < k_levels; ++j) {
        double v = n_first * std::pow(ratio, static_cast<double>(j) / (k_levels - 1));
        int n = static_cast<int>(std::llround(v));
        if (targets.empty() || targets.back() != n) targets.push_back(n);
    }
    return targets;
}

std::vector<Partition> extract_partition_stack(const PartitionStackSource& source, int k_levels,
                                               int n_first, int n_last) {
    return extract_partition_stack(source, geometric_targets(k_levels, n_first, n_last));
}

std::vector<Partition> extract_partition_stack(const PartitionStackSource& source,
                                               const std::vector<int>& targets) {
    if (targets.empty()) throw RangeError("empty target list");
    for (std::size_t i = 0; i + 1 < targets.size(); ++i)
        if (targets[i] <= targets[i + 1]) throw RangeError("targets must strictly decrease");
    std::vector<Partition> stack;

    if (source.bpt) {
        for (int t : targets) stack.push_back(partition_at(*source.bpt, t));
        return stack;
    }
    if (!source.ucm) throw RangeError("partition stack source not set");

    const GrayMap& ucm = *source.ucm;
    const bool grid =
        ucm.width % 2 == 1 && ucm.height % 2 == 1 && ucm.width >= 3 && ucm.height >= 3;
    std::set<double> values(ucm.data.begin(), ucm.data.end());
    std::vector<double> candidates;
    for (double v : values)
        if (v > 0.0) candidates.push_back(v);
    double top = values.empty() ? 1.0 : *values.rbegin();
    candidates.push_back(top + 1.0); // everything sub-threshold: single region
    // counts are non-increasing in the threshold (ucm_partition contract)
    std::vector<int> counts(candidates.size(), -1);
    auto count_at = [&](std::size_t idx) {
        if (counts[idx] < 0)
            counts[idx] = static_cast<int>(ucm_partition(ucm, candidates[idx], grid).regions.size());
        return counts[idx];
    };

    double last_threshold = -1.0;
    for (int target : targets) {
        // largest threshold whose partition still has >= target regions
        std::size_t best = 0;
        if (count_at(0) >= target) {
            std::size_t lo = 0, hi = candidates.size() - 1;
            while (lo <= hi) {
                std::size_t mid = (lo + hi) / 2;
                if (count_at(mid) >= target) {
                    best = mid;
                    lo = mid + 1;
                } else {
                    if (mid == 0) break;
                    hi = mid - 1;
                }
            }
        }
        double chosen = candidates[best];
        if (chosen == last_threshold) continue; // duplicate level
        last_threshold = chosen;
        stack.push_back(ucm_partition(ucm, chosen, grid));
    }
    return stack;
}

} // namespace hiersal

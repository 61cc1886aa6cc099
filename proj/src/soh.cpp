#include "hiersal/soh.hpp"

#include <cmath>

#include "hiersal/errors.hpp"
#include "hiersal/level_saliency.hpp"

namespace hiersal {

double center_weight(const HierarchyNode& node, int width, int height, double sigma_c2) {
    double half_diag = 0.5 * std::sqrt(static_cast<double>(width) * width +
                                       static_cast<double>(height) * height);
    double dbar = node.center_dist_sum / node.area / half_diag;
    return std::exp(-dbar * dbar / sigma_c2);
}

NodeSaliency node_saliency(const Hierarchy& h, const LabImage& img, const SohParams& params) {
    if (img.width != h.width || img.height != h.height)
        throw DimensionError("hierarchy/image size mismatch");
    const int n_nodes = h.n_nodes();
    const int n_leaves = h.n_leaves;
    const double diagonal = std::sqrt(static_cast<double>(h.width) * h.width +
                                      static_cast<double>(h.height) * h.height);

    NodeSaliency ns;
    ns.values.assign(n_nodes, 0.0);
    ns.boundary_w.resize(n_nodes);
    ns.center_w.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        const HierarchyNode& nd = h.nodes[i];
        ns.boundary_w[i] =
            std::exp(-(static_cast<double>(nd.border_len) / nd.perimeter) / params.sigma_b2);
        ns.center_w[i] = center_weight(nd, h.width, h.height, params.sigma_c2);
    }

    // leaf models from one raster pass, merged incrementally afterwards
    Partition p0;
    p0.width = h.width;
    p0.height = h.height;
    p0.labels = h.leaf_labels;
    p0.regions.resize(n_leaves);
    for (int i = 0; i < n_leaves; ++i) p0.regions[i].id = i;
    std::vector<RegionModel> models = build_models(p0, img, params.model);
    models.resize(n_nodes);

    SaliencyParams sp;
    sp.sigma_s2 = params.sigma_s2;
    sp.squared_spatial = params.squared_spatial;

    auto ws = [&](int i, int j) {
        double dx = h.nodes[i].centroid_x() - h.nodes[j].centroid_x();
        double dy = h.nodes[i].centroid_y() - h.nodes[j].centroid_y();
        return spatial_weight(std::sqrt(dx * dx + dy * dy), diagonal, sp);
    };

    // live set as a doubly-linked list ordered by node id
    std::vector<int> next(n_nodes + 1), prev(n_nodes + 1);
    const int head = n_nodes; // sentinel
    auto remove_node = [&](int i) {
        next[prev[i]] = next[i];
        prev[next[i]] = prev[i];
    };

    next[head] = 0;
    prev[head] = n_leaves - 1;
    for (int i = 0; i < n_leaves; ++i) {
        next[i] = i + 1 < n_leaves ? i + 1 : head;
        prev[i] = i > 0 ? i - 1 : head;
    }

    auto score = [&](int i, auto dist_to) {
        double s = 0.0;
        for (int j = next[head]; j != head; j = next[j]) {
            if (j == i) continue;
            s += ws(i, j) * static_cast<double>(h.nodes[j].area) * ns.boundary_w[j] * dist_to(j);
        }
        ns.values[i] = ns.boundary_w[i] * ns.center_w[i] * s;
        ns.evaluations += 1;
    };

    // pairwise leaf distances are each used twice; cache them unless the
    // matrix would dominate memory
    if (static_cast<std::size_t>(n_leaves) * n_leaves <= std::size_t{1} << 24) {
        std::vector<double> leaf_dist(static_cast<std::size_t>(n_leaves) * n_leaves, 0.0);
        for (int i = 0; i < n_leaves; ++i)
            for (int j = i + 1; j < n_leaves; ++j)
                leaf_dist[static_cast<std::size_t>(i) * n_leaves + j] =
                    leaf_dist[static_cast<std::size_t>(j) * n_leaves + i] =
                        region_distance(models[i], models[j]);
        for (int i = 0; i < n_leaves; ++i)
            score(i, [&](int j) { return leaf_dist[static_cast<std::size_t>(i) * n_leaves + j]; });
    } else {
        for (int i = 0; i < n_leaves; ++i)
            score(i, [&](int j) { return region_distance(models[i], models[j]); });
    }

    for (const Merge& m : h.merges) {
        remove_node(m.left);
        remove_node(m.right);
        models[m.node] = merge_models(models[m.left], models[m.right]);
        models[m.left] = RegionModel{};
        models[m.right] = RegionModel{};

        // append the new node; ids grow with creation order so the list
        // stays sorted
        int tail = prev[head];
        next[tail] = m.node;
        prev[m.node] = tail;
        next[m.node] = head;
        prev[head] = m.node;

        std::vector<double> dist(n_nodes, 0.0);
        for (int j = next[head]; j != head; j = next[j])
            if (j != m.node) dist[j] = region_distance(models[m.node], models[j]);
        score(m.node, [&](int j) { return dist[j]; });
    }
    return ns;
}

GrayMap integrate_raw(const Hierarchy& h, const NodeSaliency& ns) {
    const int n_nodes = h.n_nodes();
    if (static_cast<int>(ns.values.size()) != n_nodes)
        throw DimensionError("node saliency size mismatch");

    // parents always carry higher ids, so a descending sweep accumulates
    // root-to-leaf path sums
    std::vector<double> path_sum(n_nodes);
    std::vector<int> depth(n_nodes);
    for (int i = n_nodes - 1; i >= 0; --i) {
        int parent = h.nodes[i].parent;
        if (parent == -1) {
            path_sum[i] = ns.values[i];
            depth[i] = 1;
        } else {
            path_sum[i] = path_sum[parent] + ns.values[i];
            depth[i] = depth[parent] + 1;
        }
    }

    GrayMap map(h.width, h.height);
    for (std::size_t p = 0; p < map.pixel_count(); ++p) {
        int leaf = h.leaf_labels[p];
        map.data[p] = path_sum[leaf] / depth[leaf];
    }
    return map;
}

GrayMap integrate(const Hierarchy& h, const NodeSaliency& ns) {
    GrayMap map = integrate_raw(h, ns);
    rescale_to_unit(map);
    return map;
}

} // namespace hiersal

#include "hiersal/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hiersal/errors.hpp"

namespace hiersal {

void normalize_stack(LevelStack& stack) {
    if (stack.levels.empty()) throw RangeError("empty level stack");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const LevelSaliency& l : stack.levels)
        for (double v : l.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!(hi > lo)) {
        for (LevelSaliency& l : stack.levels) std::fill(l.values.begin(), l.values.end(), 0.0);
        return;
    }
    double inv = 1.0 / (hi - lo);
    for (LevelSaliency& l : stack.levels)
        for (double& v : l.values) v = (v - lo) * inv;
}

namespace {

GrayMap project_levels(const LevelStack& stack, bool take_max) {
    GrayMap map(stack.width, stack.height);
    const std::size_t k = stack.n_levels();
    for (std::size_t p = 0; p < map.pixel_count(); ++p) {
        double acc = take_max ? -std::numeric_limits<double>::infinity() : 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            double v = stack.levels[l].values[stack.partitions[l].labels[p]];
            acc = take_max ? std::max(acc, v) : acc + v;
        }
        map.data[p] = take_max ? acc : acc / static_cast<double>(k);
    }
    rescale_to_unit(map);
    return map;
}

} // namespace

GrayMap fuse_mean(const LevelStack& stack) { return project_levels(stack, false); }
GrayMap fuse_max(const LevelStack& stack) { return project_levels(stack, true); }

InferenceGraph build_graph(const LevelStack& stack, bool with_intra_level, double sigma_c2) {
    const std::size_t k = stack.n_levels();
    if (k == 0) throw RangeError("empty level stack");

    InferenceGraph g;
    g.level_offset.resize(k);
    g.level_size.resize(k);
    int next = 0;
    for (std::size_t l = 0; l < k; ++l) {
        g.level_offset[l] = next;
        g.level_size[l] = static_cast<int>(stack.partitions[l].regions.size());
        next += g.level_size[l];
    }
    g.root = next;
    g.n_nodes = next + 1;
    g.s0.assign(g.n_nodes, 0.0);
    for (std::size_t l = 0; l < k; ++l)
        for (int i = 0; i < g.level_size[l]; ++i)
            g.s0[g.level_offset[l] + i] = stack.levels[l].values[i];

    // inclusion edges: each region has exactly one container in the next level
    for (std::size_t l = 0; l + 1 < k; ++l) {
        const Partition& fine = stack.partitions[l];
        const Partition& coarse = stack.partitions[l + 1];
        std::vector<int> container(fine.regions.size(), -1);
        for (std::size_t p = 0; p < fine.labels.size(); ++p) {
            int f = fine.labels[p];
            if (container[f] == -1) container[f] = coarse.labels[p];
        }
        for (std::size_t i = 0; i < container.size(); ++i)
            g.edges.push_back({g.level_offset[l] + static_cast<int>(i),
                               g.level_offset[l + 1] + container[i], 1.0});
    }
    for (int i = 0; i < g.level_size[k - 1]; ++i)
        g.edges.push_back({g.level_offset[k - 1] + i, g.root, 1.0});
    g.n_inter_edges = static_cast<int>(g.edges.size());

    if (with_intra_level) {
        if (stack.models.size() != k)
            throw DimensionError("lbp graph needs region models for every level");
        for (std::size_t l = 0; l < k; ++l) {
            const Partition& p = stack.partitions[l];
            // color distances normalized by the level's largest adjacent-pair
            // distance so sigma_c2 is scale free
            double dmax = 0.0;
            std::vector<std::pair<std::pair<int, int>, double>> pairs;
            for (const Region& r : p.regions)
                for (const auto& [j, contact] : r.neighbor_contact)
                    if (r.id < j) {
                        double d = region_distance(stack.models[l][r.id], stack.models[l][j]);
                        pairs.push_back({{r.id, j}, d});
                        dmax = std::max(dmax, d);
                    }
            for (const auto& [ij, d] : pairs) {
                double nd = dmax > 0.0 ? d / dmax : 0.0;
                double w = std::exp(-nd * nd / sigma_c2);
                g.edges.push_back(
                    {g.level_offset[l] + ij.first, g.level_offset[l] + ij.second, w});
            }
        }
    }
    return g;
}

double graph_energy(const InferenceGraph& g, const std::vector<double>& s, double lambda) {
    double e = 0.0;
    for (int i = 0; i < g.n_nodes; ++i) {
        if (i == g.root && !g.root_data_term) continue;
        double d = s[i] - g.s0[i];
        e += d * d;
    }
    for (const GraphEdge& edge : g.edges) {
        double d = s[edge.u] - s[edge.v];
        e += lambda * edge.weight * d * d;
    }
    return e;
}

InferResult infer_exact(const InferenceGraph& g, const FusionParams& params) {
    const int n = g.n_nodes;
    const double lambda = params.lambda;

    // normal equations: (D + lambda L) s = D s0, D = diag(data-term flags)
    std::vector<double> diag(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (i != g.root || g.root_data_term) diag[i] = 1.0;
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const GraphEdge& e : g.edges) {
        adj[e.u].emplace_back(e.v, e.weight);
        adj[e.v].emplace_back(e.u, e.weight);
    }
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < n; ++i) {
            double acc = diag[i] * x[i];
            for (const auto& [j, w] : adj[i]) acc += lambda * w * (x[i] - x[j]);
            y[i] = acc;
        }
    };

    std::vector<double> b(n, 0.0);
    for (int i = 0; i < n; ++i) b[i] = diag[i] * g.s0[i];

    InferResult res;
    res.values.assign(g.s0.begin(), g.s0.end());
    std::vector<double> r(n), p(n), ap(n);
    apply(res.values, ap);
    double bnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        r[i] = b[i] - ap[i];
        bnorm2 += b[i] * b[i];
    }
    p = r;
    double rr = 0.0;
    for (int i = 0; i < n; ++i) rr += r[i] * r[i];
    const double stop = params.cg_tolerance * params.cg_tolerance * std::max(bnorm2, 1e-300);
    const int max_iters = 10 * n;

    int it = 0;
    while (rr > stop && it < max_iters) {
        apply(p, ap);
        double pap = 0.0;
        for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0.0) break;
        double alpha = rr / pap;
        for (int i = 0; i < n; ++i) {
            res.values[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rr_new = 0.0;
        for (int i = 0; i < n; ++i) rr_new += r[i] * r[i];
        double beta = rr_new / rr;
        rr = rr_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        ++it;
    }
    res.iterations = it;
    res.converged = rr <= stop;
    res.energy = graph_energy(g, res.values, lambda);
    return res;
}

InferResult infer_message_passing(const InferenceGraph& g, const FusionParams& params) {
    const int n = g.n_nodes;
    const int L = params.n_labels;
    const double lambda = params.lambda;
    const int n_edges = static_cast<int>(g.edges.size());

    std::vector<double> labels(L);
    for (int l = 0; l < L; ++l) labels[l] = L > 1 ? static_cast<double>(l) / (L - 1) : 0.0;

    std::vector<std::vector<double>> data(n, std::vector<double>(L));
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < L; ++l) {
            if (i == g.root && !g.root_data_term) {
                data[i][l] = 0.0;
            } else {
                double d = labels[l] - g.s0[i];
                data[i][l] = d * d;
            }
        }

    // directed messages: 2*e for edge e (u->v), 2*e+1 (v->u)
    std::vector<std::vector<double>> msg(2 * n_edges, std::vector<double>(L, 0.0));
    std::vector<std::vector<double>> next_msg(2 * n_edges, std::vector<double>(L, 0.0));
    std::vector<std::vector<std::pair<int, int>>> in_edges(n); // node -> (msg id, edge id)
    for (int e = 0; e < n_edges; ++e) {
        in_edges[g.edges[e].v].push_back({2 * e, e});
        in_edges[g.edges[e].u].push_back({2 * e + 1, e});
    }

    auto assignment_energy = [&](const std::vector<int>& pick) {
        std::vector<double> s(n);
        for (int i = 0; i < n; ++i) s[i] = labels[pick[i]];
        return graph_energy(g, s, lambda);
    };

    std::vector<int> pick(n, 0), best_pick;
    double best_energy = std::numeric_limits<double>::infinity();
    InferResult res;
    res.converged = false;

    std::vector<double> belief(L);
    int iter = 0;
    for (; iter < params.max_iterations; ++iter) {
        double delta = 0.0;
        for (int e = 0; e < n_edges; ++e) {
            const GraphEdge& edge = g.edges[e];
            for (int dir = 0; dir < 2; ++dir) {
                int from = dir == 0 ? edge.u : edge.v;
                int out_id = 2 * e + dir;
                // h = data + incoming messages except the reverse one
                for (int l = 0; l < L; ++l) belief[l] = data[from][l];
                for (const auto& [mid, eid] : in_edges[from])
                    if (eid != e)
                        for (int l = 0; l < L; ++l) belief[l] += msg[mid][l];
                double w = lambda * edge.weight;
                std::vector<double>& out = next_msg[out_id];
                double lo = std::numeric_limits<double>::infinity();
                for (int lt = 0; lt < L; ++lt) {
                    double m = std::numeric_limits<double>::infinity();
                    for (int ls = 0; ls < L; ++ls) {
                        double d = labels[ls] - labels[lt];
                        m = std::min(m, belief[ls] + w * d * d);
                    }
                    out[lt] = m;
                    lo = std::min(lo, m);
                }
                for (int lt = 0; lt < L; ++lt) {
                    out[lt] -= lo; // keep messages bounded
                    delta = std::max(delta, std::abs(out[lt] - msg[out_id][lt]));
                }
            }
        }
        msg.swap(next_msg);

        for (int i = 0; i < n; ++i) {
            for (int l = 0; l < L; ++l) belief[l] = data[i][l];
            for (const auto& [mid, eid] : in_edges[i])
                for (int l = 0; l < L; ++l) belief[l] += msg[mid][l];
            int arg = 0;
            for (int l = 1; l < L; ++l)
                if (belief[l] < belief[arg]) arg = l;
            pick[i] = arg;
        }
        double energy = assignment_energy(pick);
        if (energy < best_energy) {
            best_energy = energy;
            best_pick = pick;
        }
        if (delta < 1e-9) {
            res.converged = true;
            ++iter;
            break;
        }
    }

    res.iterations = iter;
    res.values.resize(n);
    for (int i = 0; i < n; ++i) res.values[i] = labels[best_pick[i]];
    res.energy = best_energy;
    return res;
}

InferResult infer(const InferenceGraph& g, const FusionParams& params) {
    return params.discrete ? infer_message_passing(g, params) : infer_exact(g, params);
}

GrayMap fuse(const LevelStack& stack, FusionStrategy strategy, const FusionParams& params) {
    if (strategy == FusionStrategy::Mean) return fuse_mean(stack);
    if (strategy == FusionStrategy::Max) return fuse_max(stack);

    InferenceGraph g =
        build_graph(stack, strategy == FusionStrategy::Lbp, params.sigma_c2);
    InferResult res = infer(g, params);

    GrayMap map(stack.width, stack.height);
    const Partition& finest = stack.partitions.front();
    for (std::size_t p = 0; p < map.pixel_count(); ++p)
        map.data[p] = res.values[g.level_offset[0] + finest.labels[p]];
    rescale_to_unit(map);
    return map;
}

} // namespace hiersal

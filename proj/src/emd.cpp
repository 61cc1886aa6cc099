#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hiersal/errors.hpp"
#include "hiersal/region_model.hpp"

namespace hiersal {

namespace {

constexpr double kEnterTol = 1e-9;

struct Cell {
    int i = -1;
    int j = -1;
    double flow = 0.0;
};

// Transportation simplex state over m supplies and n demands. Basis cells
// form a spanning tree of the bipartite row/column node graph.
struct Transport {
    int m, n;
    std::vector<double> cost; // m*n
    std::vector<Cell> basis;
    std::vector<std::vector<int>> adj; // node -> basis cell ids; cols offset by m
    std::vector<signed char> in_basis; // m*n flags

    double& c(int i, int j) { return cost[static_cast<std::size_t>(i) * n + j]; }

    void add_basis(int i, int j, double flow) {
        int id = static_cast<int>(basis.size());
        basis.push_back({i, j, flow});
        adj[i].push_back(id);
        adj[m + j].push_back(id);
        in_basis[static_cast<std::size_t>(i) * n + j] = 1;
    }

    void replace_basis(int leaving_id, int i, int j) {
        const Cell& old = basis[leaving_id];
        auto drop = [&](int node) {
            auto& v = adj[node];
            v.erase(std::find(v.begin(), v.end(), leaving_id));
        };
        drop(old.i);
        drop(m + old.j);
        in_basis[static_cast<std::size_t>(old.i) * n + old.j] = 0;
        basis[leaving_id] = {i, j, 0.0};
        adj[i].push_back(leaving_id);
        adj[m + j].push_back(leaving_id);
        in_basis[static_cast<std::size_t>(i) * n + j] = 1;
    }
};

// Vogel's approximation: repeatedly allocate in the open line with the
// largest penalty (gap between its two cheapest open cells).
void vogel_initial(Transport& t, std::vector<double> supply, std::vector<double> demand) {
    const int m = t.m, n = t.n;
    std::vector<bool> row_open(m, true), col_open(n, true);
    int rows = m, cols = n;
    constexpr double inf = std::numeric_limits<double>::infinity();

    while (rows > 0 && cols > 0) {
        if (rows == 1 && cols == 1) {
            int i = static_cast<int>(std::find(row_open.begin(), row_open.end(), true) -
                                     row_open.begin());
            int j = static_cast<int>(std::find(col_open.begin(), col_open.end(), true) -
                                     col_open.begin());
            t.add_basis(i, j, std::min(supply[i], demand[j]));
            break;
        }

        double best_penalty = -1.0;
        bool best_is_row = true;
        int best_line = -1;
        auto consider = [&](bool is_row, int idx, double penalty) {
            if (penalty > best_penalty) {
                best_penalty = penalty;
                best_is_row = is_row;
                best_line = idx;
            }
        };
        for (int i = 0; i < m; ++i) {
            if (!row_open[i]) continue;
            double m1 = inf, m2 = inf;
            for (int j = 0; j < n; ++j) {
                if (!col_open[j]) continue;
                double v = t.c(i, j);
                if (v < m1) {
                    m2 = m1;
                    m1 = v;
                } else if (v < m2) {
                    m2 = v;
                }
            }
            consider(true, i, m2 == inf ? inf : m2 - m1);
        }
        for (int j = 0; j < n; ++j) {
            if (!col_open[j]) continue;
            double m1 = inf, m2 = inf;
            for (int i = 0; i < m; ++i) {
                if (!row_open[i]) continue;
                double v = t.c(i, j);
                if (v < m1) {
                    m2 = m1;
                    m1 = v;
                } else if (v < m2) {
                    m2 = v;
                }
            }
            consider(false, j, m2 == inf ? inf : m2 - m1);
        }

        int bi = -1, bj = -1;
        double best_cost = inf;
        if (best_is_row) {
            bi = best_line;
            for (int j = 0; j < n; ++j)
                if (col_open[j] && t.c(bi, j) < best_cost) {
                    best_cost = t.c(bi, j);
                    bj = j;
                }
        } else {
            bj = best_line;
            for (int i = 0; i < m; ++i)
                if (row_open[i] && t.c(i, bj) < best_cost) {
                    best_cost = t.c(i, bj);
                    bi = i;
                }
        }

        double theta = std::min(supply[bi], demand[bj]);
        t.add_basis(bi, bj, theta);
        supply[bi] -= theta;
        demand[bj] -= theta;
        bool row_done = supply[bi] <= 0.0;
        bool col_done = demand[bj] <= 0.0;
        if (row_done && col_done) {
            // degenerate: close a single line so the basis stays a tree
            if (rows > 1 || cols == 1) {
                row_open[bi] = false;
                --rows;
            } else {
                col_open[bj] = false;
                --cols;
            }
        } else if (row_done) {
            row_open[bi] = false;
            --rows;
        } else {
            col_open[bj] = false;
            --cols;
        }
    }
}

// Basic cells must span all row/col nodes; degenerate starts can leave a
// forest, bridged here with zero-flow cells.
void connect_basis(Transport& t) {
    const int total = t.m + t.n;
    for (;;) {
        std::vector<bool> seen(total, false);
        std::vector<int> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            int node = stack.back();
            stack.pop_back();
            for (int id : t.adj[node]) {
                const Cell& cl = t.basis[id];
                int other = node < t.m ? t.m + cl.j : cl.i;
                if (!seen[other]) {
                    seen[other] = true;
                    stack.push_back(other);
                }
            }
        }
        int missing = -1;
        for (int v = 0; v < total; ++v)
            if (!seen[v]) {
                missing = v;
                break;
            }
        if (missing == -1) return;
        bool missing_is_row = missing < t.m;
        int bi = -1, bj = -1;
        for (int v = 0; v < total && bi == -1; ++v) {
            if (!seen[v]) continue;
            if (missing_is_row && v >= t.m) {
                bi = missing;
                bj = v - t.m;
            } else if (!missing_is_row && v < t.m) {
                bi = v;
                bj = missing - t.m;
            }
        }
        t.add_basis(bi, bj, 0.0);
    }
}

} // namespace

double emd(const std::vector<Signature>& a, const std::vector<Signature>& b) {
    if (a.empty() || b.empty()) throw RangeError("emd of an empty signature set");
    const int m = static_cast<int>(a.size());
    const int n = static_cast<int>(b.size());

    Transport t;
    t.m = m;
    t.n = n;
    t.cost.resize(static_cast<std::size_t>(m) * n);
    t.in_basis.assign(static_cast<std::size_t>(m) * n, 0);
    t.adj.resize(m + n);
    t.basis.reserve(m + n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) t.c(i, j) = lab_distance(a[i].color, b[j].color);

    std::vector<double> supply(m), demand(n);
    double ts = 0.0, td = 0.0;
    for (int i = 0; i < m; ++i) ts += (supply[i] = a[i].weight);
    for (int j = 0; j < n; ++j) td += (demand[j] = b[j].weight);
    double scale = ts / td; // absorb normalization drift
    for (double& d : demand) d *= scale;

    vogel_initial(t, supply, demand);
    connect_basis(t);

    std::vector<double> u(m), v(n);
    std::vector<signed char> known(m + n);
    std::vector<int> order;
    order.reserve(m + n);
    std::vector<int> parent_cell(m + n);

    const long pivot_cap = 20L * m * n + 1000;
    const long bland_after = 5L * m * n + 100;
    for (long pivot = 0;; ++pivot) {
        // duals over the basis tree
        std::fill(known.begin(), known.end(), 0);
        u[0] = 0.0;
        known[0] = 1;
        order.assign(1, 0);
        for (std::size_t head = 0; head < order.size(); ++head) {
            int node = order[head];
            for (int id : t.adj[node]) {
                const Cell& cl = t.basis[id];
                int other = node < m ? m + cl.j : cl.i;
                if (known[other]) continue;
                if (node < m)
                    v[cl.j] = t.c(cl.i, cl.j) - u[cl.i];
                else
                    u[cl.i] = t.c(cl.i, cl.j) - v[cl.j];
                known[other] = 1;
                order.push_back(other);
            }
        }

        // entering cell: most negative reduced cost, Bland's rule as a
        // fallback against degenerate cycling
        int ei = -1, ej = -1;
        if (pivot < bland_after) {
            double best = -kEnterTol;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) {
                    if (t.in_basis[static_cast<std::size_t>(i) * n + j]) continue;
                    double r = t.c(i, j) - u[i] - v[j];
                    if (r < best) {
                        best = r;
                        ei = i;
                        ej = j;
                    }
                }
        } else {
            for (int i = 0; i < m && ei == -1; ++i)
                for (int j = 0; j < n; ++j) {
                    if (t.in_basis[static_cast<std::size_t>(i) * n + j]) continue;
                    if (t.c(i, j) - u[i] - v[j] < -kEnterTol) {
                        ei = i;
                        ej = j;
                        break;
                    }
                }
        }
        if (ei == -1 || pivot >= pivot_cap) break;

        // unique path row ei -> col ej in the basis tree
        std::fill(known.begin(), known.end(), 0);
        std::fill(parent_cell.begin(), parent_cell.end(), -1);
        order.assign(1, ei);
        known[ei] = 1;
        int target = m + ej;
        for (std::size_t head = 0; head < order.size() && !known[target]; ++head) {
            int node = order[head];
            for (int id : t.adj[node]) {
                const Cell& cl = t.basis[id];
                int other = node < m ? m + cl.j : cl.i;
                if (known[other]) continue;
                known[other] = 1;
                parent_cell[other] = id;
                order.push_back(other);
                if (other == target) break;
            }
        }

        // cells on the cycle alternate -theta starting at the row end
        std::vector<int> path;
        for (int node = target; node != ei;) {
            int id = parent_cell[node];
            path.push_back(id);
            const Cell& cl = t.basis[id];
            node = (node >= m) ? cl.i : m + cl.j;
        }
        std::reverse(path.begin(), path.end()); // now from ei toward ej

        double theta = std::numeric_limits<double>::infinity();
        int leaving = -1;
        for (std::size_t k = 0; k < path.size(); k += 2) {
            const Cell& cl = t.basis[path[k]];
            if (cl.flow < theta ||
                (cl.flow == theta &&
                 (leaving == -1 || cl.i < t.basis[leaving].i ||
                  (cl.i == t.basis[leaving].i && cl.j < t.basis[leaving].j)))) {
                theta = cl.flow;
                leaving = path[k];
            }
        }

        for (std::size_t k = 0; k < path.size(); ++k) {
            double& f = t.basis[path[k]].flow;
            f += (k % 2 == 0) ? -theta : theta;
            if (f < 0.0 && f > -1e-12) f = 0.0; // cancellation dust
        }
        t.replace_basis(leaving, ei, ej);
        t.basis[leaving].flow = theta;
    }

    double total = 0.0;
    for (const Cell& cl : t.basis) total += cl.flow * t.c(cl.i, cl.j);
    return total;
}

} // namespace hiersal

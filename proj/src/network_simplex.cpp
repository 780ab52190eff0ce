#include "emlab/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace emlab {

// Arc ids: [0, m*n) bipartite source->sink arcs; m*n + t is the artificial
// arc for node t (source t -> root for t < m, root -> sink for t >= m).
// The initial basis is the artificial star, which is strongly feasible when
// all supplies and demands are positive; the leaving-arc rule below keeps it
// strongly feasible, so the method terminates without cycling.

NetworkSimplex::NetworkSimplex(int m, int n, const std::vector<double>& supply,
                               const std::vector<double>& demand,
                               const std::vector<double>& cost)
    : m_(m), n_(n), nodes_(m + n + 1), root_(m + n), cost_(cost) {
    if (int(supply.size()) != m || int(demand.size()) != n ||
        cost.size() != std::size_t(m) * std::size_t(n))
        throw std::invalid_argument("NetworkSimplex: shape mismatch");
    excess_.resize(nodes_ - 1);
    for (int i = 0; i < m_; ++i) {
        if (supply[i] <= 0) throw std::invalid_argument("NetworkSimplex: supplies must be > 0");
        excess_[i] = supply[i];
    }
    for (int j = 0; j < n_; ++j) {
        if (demand[j] <= 0) throw std::invalid_argument("NetworkSimplex: demands must be > 0");
        excess_[m_ + j] = -demand[j];
    }
}

double NetworkSimplex::solve() {
    double max_cost = 0.0;
    for (double c : cost_) max_cost = std::max(max_cost, std::abs(c));
    const double big = (double(nodes_) + 1.0) * (max_cost + 1.0);

    potential_.assign(nodes_, 0.0);
    parent_.assign(nodes_, root_);
    pred_arc_.assign(nodes_, -1);
    tree_flow_.assign(nodes_, 0.0);
    arc_up_.assign(nodes_, false);
    depth_.assign(nodes_, 1);
    parent_[root_] = -1;
    depth_[root_] = 0;
    const long total_arcs = long(m_) * n_ + nodes_ - 1;
    for (int t = 0; t < nodes_ - 1; ++t) {
        pred_arc_[t] = int(long(m_) * n_) + t;
        if (t < m_) {  // source -> root carries the supply
            tree_flow_[t] = excess_[t];
            arc_up_[t] = true;
            potential_[t] = big;
        } else {  // root -> sink carries the demand
            tree_flow_[t] = -excess_[t];
            arc_up_[t] = false;
            potential_[t] = -big;
        }
    }

    auto arc_tail = [&](long a) -> int {
        if (a < long(m_) * n_) return int(a / n_);
        int t = int(a - long(m_) * n_);
        return t < m_ ? t : root_;
    };
    auto arc_head = [&](long a) -> int {
        if (a < long(m_) * n_) return m_ + int(a % n_);
        int t = int(a - long(m_) * n_);
        return t < m_ ? root_ : t;
    };
    auto full_cost = [&](long a) -> double { return a < long(m_) * n_ ? cost_[a] : big; };
    auto rc = [&](long a) -> double {
        return full_cost(a) - potential_[arc_tail(a)] + potential_[arc_head(a)];
    };

    const long block = std::max<long>(64, long(std::sqrt(double(total_arcs))) + 1);
    long cursor = 0;
    const long max_pivots = 500 * long(nodes_) * long(nodes_) + 100000;
    std::vector<int> path_u, path_v, chain;
    std::vector<int> order;
    order.reserve(nodes_);
    std::vector<std::vector<int>> children(nodes_);

    while (true) {
        // entering arc: best reduced cost in the first block that has one
        long entering = -1;
        double best = -kPivotTol;
        long scanned = 0;
        while (scanned < total_arcs) {
            long stop = std::min<long>(block, total_arcs - scanned);
            for (long s = 0; s < stop; ++s) {
                double r = rc(cursor);
                if (r < best) {
                    best = r;
                    entering = cursor;
                }
                if (++cursor == total_arcs) cursor = 0;
            }
            scanned += stop;
            if (entering >= 0) break;
        }
        if (entering < 0) break;  // dual feasible: optimal

        if (++pivots_ > max_pivots)
            throw std::runtime_error("NetworkSimplex: pivot budget exceeded");

        int u = arc_tail(entering), v = arc_head(entering);
        path_u.clear();
        path_v.clear();
        int a = u, b = v;
        while (depth_[a] > depth_[b]) {
            path_u.push_back(a);
            a = parent_[a];
        }
        while (depth_[b] > depth_[a]) {
            path_v.push_back(b);
            b = parent_[b];
        }
        while (a != b) {
            path_u.push_back(a);
            path_v.push_back(b);
            a = parent_[a];
            b = parent_[b];
        }
        // theta: minimum residual over arcs whose flow decreases. An arc at
        // node w on the tail side decreases when it points up, on the head
        // side when it points down.
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        bool leave_on_tail = false;
        // traverse in cycle orientation starting at the apex: down the tail
        // side, entering arc, up the head side; keep the LAST blocking arc
        for (auto it = path_u.rbegin(); it != path_u.rend(); ++it) {
            int w = *it;
            if (arc_up_[w] && tree_flow_[w] <= theta) {
                theta = tree_flow_[w];
                leave = w;
                leave_on_tail = true;
            }
        }
        for (int w : path_v) {
            if (!arc_up_[w] && tree_flow_[w] <= theta) {
                theta = tree_flow_[w];
                leave = w;
                leave_on_tail = false;
            }
        }
        if (leave < 0) throw std::runtime_error("NetworkSimplex: unbounded pivot");

        for (int w : path_u) tree_flow_[w] += arc_up_[w] ? -theta : theta;
        for (int w : path_v) tree_flow_[w] += arc_up_[w] ? theta : -theta;

        // re-root the subtree cut off by the leaving arc at the entering
        // arc's endpoint inside it
        int e_in = leave_on_tail ? u : v;
        int e_out = leave_on_tail ? v : u;
        chain.clear();
        for (int w = e_in;; w = parent_[w]) {
            chain.push_back(w);
            if (w == leave) break;
        }
        for (int t = int(chain.size()) - 1; t >= 1; --t) {
            int w = chain[t], c = chain[t - 1];
            parent_[w] = c;
            pred_arc_[w] = pred_arc_[c];
            tree_flow_[w] = tree_flow_[c];
            arc_up_[w] = !arc_up_[c];
        }
        parent_[e_in] = e_out;
        pred_arc_[e_in] = int(entering);
        tree_flow_[e_in] = theta;
        arc_up_[e_in] = (e_in == u);

        // refresh depths and potentials from scratch (cheap next to pricing)
        for (auto& ch : children) ch.clear();
        for (int w = 0; w < nodes_; ++w)
            if (w != root_) children[parent_[w]].push_back(w);
        order.clear();
        order.push_back(root_);
        for (std::size_t t = 0; t < order.size(); ++t) {
            int w = order[t];
            for (int c : children[w]) {
                depth_[c] = depth_[w] + 1;
                double cc = full_cost(pred_arc_[c]);
                potential_[c] = arc_up_[c] ? potential_[w] + cc : potential_[w] - cc;
                order.push_back(c);
            }
        }
    }

    // artificial arcs must be drained at optimality
    for (int t = 0; t < nodes_ - 1; ++t)
        if (pred_arc_[t] >= long(m_) * n_ && tree_flow_[t] > 1e-9)
            throw std::runtime_error("NetworkSimplex: residual artificial flow (unbalanced?)");

    double obj = 0.0;
    for (int w = 0; w < nodes_ - 1; ++w)
        if (pred_arc_[w] < long(m_) * n_) obj += tree_flow_[w] * cost_[pred_arc_[w]];
    return obj;
}

std::vector<double> NetworkSimplex::flows() const {
    std::vector<double> f(std::size_t(m_) * n_, 0.0);
    for (int w = 0; w < nodes_ - 1; ++w)
        if (pred_arc_[w] >= 0 && pred_arc_[w] < int(long(m_) * n_)) f[pred_arc_[w]] = tree_flow_[w];
    return f;
}

}  // namespace emlab

#pragma once

// Network simplex specialized to the dense bipartite transportation problem:
// m supply nodes, n demand nodes, every supply-demand arc present, plus an
// artificial root with big-M arcs providing the initial basis. Costs are
// doubles; a pivot is accepted only when the reduced cost is below -1e-12.

#include <cstdint>
#include <vector>

namespace emlab {

class NetworkSimplex {
  public:
    // cost is row-major m x n. supply and demand must both sum to the same
    // total (up to fp noise); they are balanced internally.
    NetworkSimplex(int m, int n, const std::vector<double>& supply,
                   const std::vector<double>& demand, const std::vector<double>& cost);

    // runs to optimality and returns the objective over the bipartite arcs
    double solve();

    // basic flows after solve, row-major m x n (non-tree arcs are 0)
    std::vector<double> flows() const;

    long pivot_count() const { return pivots_; }

  private:
    static constexpr double kPivotTol = 1e-12;

    int m_, n_, nodes_, root_;
    const std::vector<double>& cost_;
    std::vector<double> excess_;     // +supply for sources, -demand for sinks
    std::vector<double> potential_;  // node potentials
    std::vector<int> parent_;        // tree parent
    std::vector<int> pred_arc_;      // arc to parent: bipartite id or artificial
    std::vector<double> tree_flow_;  // flow on the arc to parent
    std::vector<bool> arc_up_;       // arc to parent points from node to parent
    std::vector<int> depth_;
    long pivots_ = 0;
};

}  // namespace emlab

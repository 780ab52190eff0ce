#pragma once

// Discrete measures and exact W1 via min-cost flow. The ground cost is the
// scaled Euclidean distance truncated at 2, matching the dual bound
// |f| <= 1, Lip(f) <= 1; systems scale their metric so the phase-box diameter
// is <= 2 and the truncation is vacuous in practice.

#include <array>
#include <cmath>
#include <vector>

#include "emlab/common.hpp"
#include "emlab/dynsys.hpp"

namespace emlab {

struct DiscreteMeasure {
    int dim = 1;
    std::vector<std::array<double, 2>> atoms;
    std::vector<double> weights;

    int size() const { return int(atoms.size()); }
    void validate() const;  // finite coords, weights >= 0 summing to 1 (1e-12)
};

struct GroundMetric {
    double scale = 1.0;
    static constexpr double cap = 2.0;

    double operator()(const std::array<double, 2>& p, const std::array<double, 2>& q,
                      int dim) const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
        double d = scale * std::sqrt(s);
        return d < cap ? d : cap;
    }
};

// Uniform weight 1/n on the first n orbit points; coinciding atoms merged by
// exact coordinate equality. Throws EscapeError if the trajectory escaped.
DiscreteMeasure empirical_from_trajectory(const Trajectory& traj, int dim);

// Exact optimal transport cost for the truncated ground metric, solved by
// network simplex on the bipartite transport graph.
double w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GroundMetric& metric);

// 1D closed form scale * integral |F_mu - F_nu|; agrees with w1 whenever no
// mass needs to move farther than the cap. Oracle use only.
double w1_line_closedform(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const GroundMetric& metric);

// Bins atoms to the grid of pitch `cell` (atoms move to occupied cell
// centers, weights summed). w1(mu, quantize(mu)) <= cell * sqrt(dim) / 2.
DiscreteMeasure quantize(const DiscreteMeasure& mu, double cell);

}  // namespace emlab

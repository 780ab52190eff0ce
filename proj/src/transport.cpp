#include "emlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "emlab/network_simplex.hpp"

namespace emlab {

void DiscreteMeasure::validate() const {
    if (dim != 1 && dim != 2) throw UsageError("measure: dim must be 1 or 2");
    if (atoms.empty()) throw UsageError("measure: needs at least one atom");
    if (atoms.size() != weights.size()) throw UsageError("measure: atom/weight count mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (int c = 0; c < dim; ++c)
            if (!std::isfinite(atoms[i][c])) throw UsageError("measure: non-finite coordinate");
        if (!(weights[i] >= 0.0)) throw UsageError("measure: negative weight");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw UsageError("measure: weights sum to " + format_double(total) + ", expected 1");
}

DiscreteMeasure empirical_from_trajectory(const Trajectory& traj, int dim) {
    if (traj.n() < 1) throw UsageError("empirical_from_trajectory: empty trajectory");
    if (traj.escaped()) throw EscapeError(traj.escape_time);
    std::map<std::array<double, 2>, double> merged;
    double w = 1.0 / double(traj.n());
    for (const auto& z : traj.points) {
        std::array<double, 2> key = z.c;
        if (dim == 1) key[1] = 0.0;
        merged[key] += w;
    }
    DiscreteMeasure mu;
    mu.dim = dim;
    mu.atoms.reserve(merged.size());
    mu.weights.reserve(merged.size());
    for (const auto& [pt, wt] : merged) {
        mu.atoms.push_back(pt);
        mu.weights.push_back(wt);
    }
    return mu;
}

double w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GroundMetric& metric) {
    mu.validate();
    nu.validate();
    if (mu.dim != nu.dim) throw UsageError("w1: dimension mismatch");

    // drop zero-weight atoms so the initial simplex basis is strongly feasible
    std::vector<int> mi, ni;
    for (int i = 0; i < mu.size(); ++i)
        if (mu.weights[i] > 0.0) mi.push_back(i);
    for (int j = 0; j < nu.size(); ++j)
        if (nu.weights[j] > 0.0) ni.push_back(j);
    if (mi.empty() || ni.empty()) throw UsageError("w1: measure with zero total mass");

    int m = int(mi.size()), n = int(ni.size());
    std::vector<double> supply(m), demand(n), cost(std::size_t(m) * n);
    for (int i = 0; i < m; ++i) supply[i] = mu.weights[mi[i]];
    for (int j = 0; j < n; ++j) demand[j] = nu.weights[ni[j]];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            cost[std::size_t(i) * n + j] = metric(mu.atoms[mi[i]], nu.atoms[ni[j]], mu.dim);

    NetworkSimplex solver(m, n, supply, demand, cost);
    return solver.solve();
}

double w1_line_closedform(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const GroundMetric& metric) {
    mu.validate();
    nu.validate();
    if (mu.dim != 1 || nu.dim != 1) throw UsageError("w1_line_closedform: 1D measures only");

    // integral of |F_mu - F_nu| over the union support
    struct Ev {
        double x, dmu, dnu;
    };
    std::vector<Ev> evs;
    evs.reserve(mu.size() + nu.size());
    for (int i = 0; i < mu.size(); ++i) evs.push_back({mu.atoms[i][0], mu.weights[i], 0.0});
    for (int j = 0; j < nu.size(); ++j) evs.push_back({nu.atoms[j][0], 0.0, nu.weights[j]});
    std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) { return a.x < b.x; });

    double acc = 0.0, diff = 0.0;
    for (std::size_t t = 0; t + 1 <= evs.size(); ++t) {
        diff += evs[t].dmu - evs[t].dnu;
        if (t + 1 < evs.size()) acc += std::abs(diff) * (evs[t + 1].x - evs[t].x);
    }
    return metric.scale * acc;
}

DiscreteMeasure quantize(const DiscreteMeasure& mu, double cell) {
    mu.validate();
    if (!(cell > 0.0)) throw UsageError("quantize: cell must be > 0");
    std::map<std::array<long long, 2>, double> bins;
    for (int i = 0; i < mu.size(); ++i) {
        std::array<long long, 2> key{0, 0};
        for (int c = 0; c < mu.dim; ++c) key[c] = (long long)std::floor(mu.atoms[i][c] / cell);
        bins[key] += mu.weights[i];
    }
    DiscreteMeasure q;
    q.dim = mu.dim;
    q.atoms.reserve(bins.size());
    q.weights.reserve(bins.size());
    for (const auto& [key, wt] : bins) {
        std::array<double, 2> pt{0.0, 0.0};
        for (int c = 0; c < mu.dim; ++c) pt[c] = (double(key[c]) + 0.5) * cell;
        q.atoms.push_back(pt);
        q.weights.push_back(wt);
    }
    return q;
}

}  // namespace emlab

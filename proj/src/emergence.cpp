#include "emlab/emergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "emlab/common.hpp"

namespace emlab {

void EmergenceQuery::validate() const {
    if (n_ladder.empty()) throw UsageError("n_ladder must be nonempty");
    for (std::size_t i = 0; i < n_ladder.size(); ++i) {
        if (n_ladder[i] < 1) throw UsageError("n_ladder entries must be >= 1");
        if (i > 0 && n_ladder[i] <= n_ladder[i - 1])
            throw UsageError("n_ladder must be strictly increasing");
    }
    if (sample_count < 10) throw UsageError("sample_count must be >= 10");
    if (epsilons.empty()) throw UsageError("epsilons must be nonempty");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw UsageError("epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw UsageError("epsilons must be strictly decreasing");
    }
    if (quantize_cell < 0.0 || !std::isfinite(quantize_cell))
        throw UsageError("quantize_cell must be finite and >= 0");
    if (threads < 1) throw UsageError("threads must be >= 1");
}

const char* scaling_name(ScalingClass s) {
    switch (s) {
        case ScalingClass::F: return "F";
        case ScalingClass::P: return "P";
        case ScalingClass::SupP: return "SupP";
        case ScalingClass::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

CloudResult birkhoff_cloud(const SystemSpec& sys, const ParamPoint& a, const EmergenceQuery& q,
                           int n) {
    q.validate();
    validate_param(sys, a);
    if (n < 1) throw UsageError("orbit length must be >= 1");
    const Box box = q.has_sample_box ? q.sample_box : sys.phase_box();
    if (box.dim != sys.phase_dim()) throw UsageError("sample_box dimension mismatch");

    // Initial points drawn up front so the set depends only on the query.
    Rng rng(q.seed);
    std::vector<PhasePoint> inits(static_cast<std::size_t>(q.sample_count));
    for (auto& z : inits) {
        z.c = {0.0, 0.0};
        for (int d = 0; d < box.dim; ++d) z.c[d] = rng.uniform(box.lo[d], box.hi[d]);
    }

    std::vector<DiscreteMeasure> slots(inits.size());
    std::vector<char> escaped(inits.size(), 0);
    parallel_for(inits.size(), q.threads, [&](std::size_t i) {
        Trajectory traj = orbit(sys, a, inits[i], n);
        if (traj.escaped()) {
            escaped[i] = 1;
            return;
        }
        DiscreteMeasure mu = empirical_from_trajectory(traj, sys.phase_dim());
        slots[i] = q.quantize_cell > 0.0 ? quantize(mu, q.quantize_cell) : std::move(mu);
    });

    CloudResult out;
    out.requested = q.sample_count;
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (!escaped[i]) out.measures.push_back(std::move(slots[i]));
    if (out.measures.empty())
        throw DegenerateDataError("all sampled orbits escaped; nothing to cover");
    out.survivor_fraction =
        static_cast<double>(out.measures.size()) / static_cast<double>(q.sample_count);
    out.weights.assign(out.measures.size(), 1.0 / static_cast<double>(out.measures.size()));
    return out;
}

std::vector<std::vector<double>> pairwise_w1(const std::vector<DiscreteMeasure>& cloud,
                                             const GroundMetric& metric, int threads) {
    const std::size_t s = cloud.size();
    std::vector<std::vector<double>> dist(s, std::vector<double>(s, 0.0));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(s * (s - 1) / 2);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i + 1; j < s; ++j) pairs.emplace_back(i, j);
    parallel_for(pairs.size(), threads, [&](std::size_t k) {
        auto [i, j] = pairs[k];
        double d = w1(cloud[i], cloud[j], metric);
        dist[i][j] = d;
        dist[j][i] = d;
    });
    return dist;
}

namespace {

double objective(const std::vector<double>& min_dist, const std::vector<double>& w) {
    double obj = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) obj += w[i] * min_dist[i];
    return obj;
}

// First-improvement swap local search on a fixed-size center set. d1/d2 hold
// the nearest and second-nearest center distances so removing one center is
// evaluated in O(1) per sample.
double swap_local_search(const std::vector<std::vector<double>>& dist,
                         const std::vector<double>& w, std::vector<int>& centers) {
    const std::size_t s = dist.size();
    constexpr int kMaxSweeps = 60;
    std::vector<double> d1(s), d2(s);
    std::vector<int> c1(s);
    std::vector<char> is_center(s, 0);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        std::fill(is_center.begin(), is_center.end(), 0);
        for (int c : centers) is_center[static_cast<std::size_t>(c)] = 1;
        for (std::size_t i = 0; i < s; ++i) {
            d1[i] = std::numeric_limits<double>::infinity();
            d2[i] = std::numeric_limits<double>::infinity();
            c1[i] = -1;
            for (int c : centers) {
                double d = dist[i][static_cast<std::size_t>(c)];
                if (d < d1[i]) {
                    d2[i] = d1[i];
                    d1[i] = d;
                    c1[i] = c;
                } else if (d < d2[i]) {
                    d2[i] = d;
                }
            }
        }
        const double obj = objective(d1, w);
        bool improved = false;
        for (std::size_t ci = 0; ci < centers.size() && !improved; ++ci) {
            const int out = centers[ci];
            for (std::size_t p = 0; p < s && !improved; ++p) {
                if (is_center[p]) continue;
                double cand = 0.0;
                for (std::size_t i = 0; i < s; ++i) {
                    double base = (c1[i] == out) ? d2[i] : d1[i];
                    cand += w[i] * std::min(base, dist[i][p]);
                }
                if (cand < obj - 1e-15) {
                    centers[ci] = static_cast<int>(p);
                    improved = true;
                }
            }
        }
        if (!improved) return obj;
    }
    // Converged objective not reached within the sweep budget; recompute.
    std::fill(is_center.begin(), is_center.end(), 0);
    for (int c : centers) is_center[static_cast<std::size_t>(c)] = 1;
    for (std::size_t i = 0; i < s; ++i) {
        d1[i] = std::numeric_limits<double>::infinity();
        for (int c : centers) d1[i] = std::min(d1[i], dist[i][static_cast<std::size_t>(c)]);
    }
    return objective(d1, w);
}

double bootstrap_se_of_residual(const std::vector<double>& min_dist, const std::vector<double>& w,
                                double epsilon) {
    const std::size_t s = min_dist.size();
    if (s < 2) return 0.0;
    std::vector<double> cdf(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        acc += w[i];
        cdf[i] = acc;
    }
    Rng rng(0x626f6f74u ^ (static_cast<std::uint64_t>(s) << 20) ^
            static_cast<std::uint64_t>(epsilon * 1e9));
    constexpr int kReps = 200;
    double mean = 0.0, m2 = 0.0;
    for (int r = 0; r < kReps; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            double u = rng.next_double() * acc;
            std::size_t k = static_cast<std::size_t>(
                std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            if (k >= s) k = s - 1;
            sum += min_dist[k];
        }
        double rep = sum / static_cast<double>(s);
        double delta = rep - mean;
        mean += delta / (r + 1);
        m2 += delta * (rep - mean);
    }
    return std::sqrt(m2 / (kReps - 1));
}

}  // namespace

CoverResult covering_number(const std::vector<std::vector<double>>& dist,
                            const std::vector<double>& weights, double epsilon) {
    const std::size_t s = dist.size();
    if (s == 0) throw UsageError("covering_number needs a nonempty cloud");
    if (weights.size() != s) throw UsageError("weights size mismatch");
    if (!(epsilon > 0.0)) throw UsageError("epsilon must be positive");

    // Greedy chain: repeatedly add the center with the largest objective drop.
    std::vector<double> min_dist(s, std::numeric_limits<double>::infinity());
    std::vector<char> chosen(s, 0);
    std::vector<int> chain;
    double greedy_obj = std::numeric_limits<double>::infinity();
    while (chain.size() < s) {
        int best = -1;
        double best_obj = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < s; ++c) {
            if (chosen[c]) continue;
            double obj = 0.0;
            for (std::size_t i = 0; i < s; ++i)
                obj += weights[i] * std::min(min_dist[i], dist[i][c]);
            if (obj < best_obj) {
                best_obj = obj;
                best = static_cast<int>(c);
            }
        }
        chosen[static_cast<std::size_t>(best)] = 1;
        chain.push_back(best);
        for (std::size_t i = 0; i < s; ++i)
            min_dist[i] = std::min(min_dist[i], dist[i][static_cast<std::size_t>(best)]);
        greedy_obj = best_obj;
        if (greedy_obj <= epsilon) break;
    }
    if (greedy_obj > epsilon) throw SaturationError(greedy_obj);

    // Shrink: swap-optimize at decreasing sizes while the target still holds.
    std::vector<int> centers = chain;
    double residual = swap_local_search(dist, weights, centers);
    while (centers.size() > 1) {
        std::vector<int> trial(chain.begin(), chain.begin() + static_cast<long>(centers.size()) - 1);
        double obj = swap_local_search(dist, weights, trial);
        if (obj > epsilon) break;
        centers = std::move(trial);
        residual = obj;
    }

    CoverResult out;
    out.epsilon = epsilon;
    out.N = static_cast<int>(centers.size());
    std::sort(centers.begin(), centers.end());
    out.centers = centers;
    out.residual = residual;
    for (std::size_t i = 0; i < s; ++i) {
        min_dist[i] = std::numeric_limits<double>::infinity();
        for (int c : centers)
            min_dist[i] = std::min(min_dist[i], dist[i][static_cast<std::size_t>(c)]);
    }
    out.bootstrap_se = bootstrap_se_of_residual(min_dist, weights, epsilon);
    return out;
}

CoverResult covering_number(const std::vector<DiscreteMeasure>& cloud,
                            const std::vector<double>& weights, double epsilon,
                            const GroundMetric& metric, int threads) {
    return covering_number(pairwise_w1(cloud, metric, threads), weights, epsilon);
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    if (sxx <= 0.0) throw DegenerateDataError("cannot fit a slope to identical abscissae");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

}  // namespace

ScalingClass classify_scaling(const std::vector<EmergenceCurvePoint>& points,
                              FitDiagnostics* diag) {
    const std::size_t p = points.size();
    if (p < 4) throw UsageError("scaling classification needs at least 4 curve points");
    std::vector<double> x(p), y(p);
    for (std::size_t i = 0; i < p; ++i) {
        if (!(points[i].epsilon > 0.0)) throw UsageError("epsilons must be positive");
        if (i > 0 && !(points[i].epsilon < points[i - 1].epsilon))
            throw UsageError("epsilons must be strictly decreasing");
        if (points[i].N < 1) throw UsageError("covering numbers must be >= 1");
        x[i] = -std::log(points[i].epsilon);
        y[i] = std::log(static_cast<double>(points[i].N));
    }

    LineFit global = fit_line(x, y);
    std::size_t half = (p + 1) / 2;
    LineFit tail = fit_line(std::vector<double>(x.end() - half, x.end()),
                            std::vector<double>(y.end() - half, y.end()));

    // Sliding-window slopes for acceleration detection.
    const std::size_t w = std::max<std::size_t>(2, (p + 1) / 2);
    std::vector<double> win_slopes;
    for (std::size_t start = 0; start + w <= p; ++start) {
        LineFit f = fit_line(std::vector<double>(x.begin() + start, x.begin() + start + w),
                             std::vector<double>(y.begin() + start, y.begin() + start + w));
        win_slopes.push_back(f.slope);
    }

    if (diag) {
        diag->slope = global.slope;
        diag->intercept = global.intercept;
        diag->r2 = global.r2;
        diag->last_half_slope = tail.slope;
        diag->window_slopes = win_slopes;
    }

    if (points.front().N == points.back().N && global.slope < 0.1) return ScalingClass::F;

    // Super-polynomial: window slopes accelerating, with a substantial total
    // rise so slope noise on shallow ladders does not trip the detector.
    constexpr double kStepMargin = 0.1;
    constexpr double kTotalRise = 0.5;
    for (std::size_t t = 0; t + 2 < win_slopes.size(); ++t) {
        if (win_slopes[t + 1] > win_slopes[t] + kStepMargin &&
            win_slopes[t + 2] > win_slopes[t + 1] + kStepMargin &&
            win_slopes[t + 2] - win_slopes[t] >= kTotalRise)
            return ScalingClass::SupP;
    }

    if (global.slope >= 0.1 && global.r2 >= 0.9 && tail.slope <= 1.5 * global.slope)
        return ScalingClass::P;
    return ScalingClass::Undetermined;
}

EmergenceCurve emergence_curve(const SystemSpec& sys, const ParamPoint& a,
                               const EmergenceQuery& q) {
    q.validate();
    const GroundMetric metric{sys.metric_scale()};
    std::vector<std::vector<CoverResult>> per_rung;
    CloudResult last_cloud;
    for (int n : q.n_ladder) {
        CloudResult cloud = birkhoff_cloud(sys, a, q, n);
        auto dist = pairwise_w1(cloud.measures, metric, q.threads);
        std::vector<CoverResult> covers;
        covers.reserve(q.epsilons.size());
        for (double eps : q.epsilons) covers.push_back(covering_number(dist, cloud.weights, eps));
        per_rung.push_back(std::move(covers));
        last_cloud = std::move(cloud);
    }

    EmergenceCurve curve;
    curve.n_used = q.n_ladder.back();
    curve.survivor_fraction = last_cloud.survivor_fraction;
    curve.reliable = curve.survivor_fraction >= 0.5;

    if (per_rung.size() >= 2) {
        const auto& prev = per_rung[per_rung.size() - 2];
        const auto& last = per_rung.back();
        double worst = 0.0;
        for (std::size_t j = 0; j < last.size(); ++j) {
            double rel = std::abs(last[j].N - prev[j].N) / std::max(1.0, double(prev[j].N));
            worst = std::max(worst, rel);
        }
        curve.stabilization = worst;
    }

    // Monotone regularization: N may never drop as epsilon shrinks.
    int floor_n = 0;
    for (const CoverResult& c : per_rung.back()) {
        EmergenceCurvePoint pt;
        pt.epsilon = c.epsilon;
        pt.N = std::max(c.N, floor_n);
        floor_n = pt.N;
        pt.residual = c.residual;
        pt.bootstrap_se = c.bootstrap_se;
        curve.points.push_back(pt);
    }

    if (curve.points.size() >= 4)
        curve.scaling = classify_scaling(curve.points, &curve.fit);
    return curve;
}

}  // namespace emlab

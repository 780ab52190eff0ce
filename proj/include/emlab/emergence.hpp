#pragma once

// Emergence estimation: Monte Carlo clouds of Birkhoff empirical measures,
// k-median covering numbers under W1, and the scaling classifier. The center
// restriction to cloud members over-estimates the covering number by at most
// a factor of two (each true center can be replaced by its nearest cloud
// member); every run logs that remark.

#include <cstdint>
#include <vector>

#include "emlab/dynsys.hpp"
#include "emlab/transport.hpp"

namespace emlab {

struct EmergenceQuery {
    std::vector<int> n_ladder{1000, 10000, 100000};
    int sample_count = 400;
    std::vector<double> epsilons;  // strictly decreasing, all > 0
    double quantize_cell = 0.0;    // 0 disables quantization
    std::uint64_t seed = 0;
    int threads = 1;
    bool has_sample_box = false;
    Box sample_box;  // initial conditions; defaults to the phase box

    void validate() const;
};

struct CloudResult {
    std::vector<DiscreteMeasure> measures;  // one per surviving sample
    std::vector<double> weights;            // uniform over survivors
    int requested = 0;
    double survivor_fraction = 0.0;
};

struct CoverResult {
    double epsilon = 0.0;
    int N = 0;
    double residual = 0.0;        // weighted mean distance to nearest center
    double bootstrap_se = 0.0;    // bootstrap standard error of the residual
    std::vector<int> centers;     // indices into the cloud
};

enum class ScalingClass { F, P, SupP, Undetermined };

struct FitDiagnostics {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double last_half_slope = 0.0;
    std::vector<double> window_slopes;
};

struct EmergenceCurvePoint {
    double epsilon = 0.0;
    int N = 0;
    double residual = 0.0;
    double bootstrap_se = 0.0;
};

struct EmergenceCurve {
    std::vector<EmergenceCurvePoint> points;  // at n_used, epsilon decreasing
    int n_used = 0;
    double survivor_fraction = 0.0;
    bool reliable = true;       // survivor fraction >= 1/2
    double stabilization = 0.0; // max relative N change across the last two rungs
    ScalingClass scaling = ScalingClass::Undetermined;
    FitDiagnostics fit;
};

const char* scaling_name(ScalingClass s);

// One empirical measure per surviving sampled initial point, n orbit points
// each. Initial points depend only on the query (not on n).
CloudResult birkhoff_cloud(const SystemSpec& sys, const ParamPoint& a, const EmergenceQuery& q,
                           int n);

// Full symmetric W1 matrix of the cloud.
std::vector<std::vector<double>> pairwise_w1(const std::vector<DiscreteMeasure>& cloud,
                                             const GroundMetric& metric, int threads);

// Smallest center count found with weighted mean min-distance <= epsilon;
// greedy k-median with swap local search, centers restricted to the cloud.
CoverResult covering_number(const std::vector<std::vector<double>>& dist,
                            const std::vector<double>& weights, double epsilon);
CoverResult covering_number(const std::vector<DiscreteMeasure>& cloud,
                            const std::vector<double>& weights, double epsilon,
                            const GroundMetric& metric, int threads = 1);

// classify from (epsilon, N) pairs, epsilon strictly decreasing, >= 4 points
ScalingClass classify_scaling(const std::vector<EmergenceCurvePoint>& points,
                              FitDiagnostics* diag = nullptr);

EmergenceCurve emergence_curve(const SystemSpec& sys, const ParamPoint& a,
                               const EmergenceQuery& q);

}  // namespace emlab

#pragma once

// Built-in systems and the orbit layer. Phase points carry an escaped flag;
// once a trajectory escapes its phase box (or, for the parablender families,
// leaves the union of definition intervals) the escaped sentinel repeats.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "emlab/common.hpp"
#include "emlab/multiindex.hpp"

namespace emlab {

enum class SystemKind {
    Henon,
    Identity,
    Rotation,
    Doubling,
    ParablenderCore,
    ParablenderFull,
    PlantedSinks,
};

struct PhasePoint {
    std::array<double, 2> c{0.0, 0.0};
    bool escaped = false;

    double x() const { return c[0]; }
    double y() const { return c[1]; }
};

using ParamPoint = std::vector<double>;

struct Box {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};

    bool contains(const PhasePoint& z) const {
        for (int i = 0; i < dim; ++i)
            if (z.c[i] < lo[i] || z.c[i] > hi[i]) return false;
        return true;
    }
    double diameter() const;
};

// Geometry of the parablender definition intervals, derived deterministically
// from (d, k). Core branches are listed left to right; their list position is
// the branch ordinal (agrees with BranchSymbol::from_ordinal).
struct IntervalSeg {
    double lo = 0.0, hi = 0.0;
    double center() const { return 0.5 * (lo + hi); }
    double length() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct ParablenderLayout {
    explicit ParablenderLayout(MultiIndexSet e) : E(std::move(e)) {}

    MultiIndexSet E;
    std::uint64_t card = 0;               // CardDelta = 2^|E|
    std::vector<IntervalSeg> core;        // I_delta, ordinal order
    double q = 0.0;                       // common slope 2/|I_delta|
    bool full = false;
    IntervalSeg I_S, I_P, I_Pp;           // full family only
    double q_S = 0.0, q_P = 0.0, q_Pp = 0.0;
    double x_S = 0.0, x_P = 0.0, x_Pp = 0.0;
};

struct SystemSpec {
    SystemKind kind = SystemKind::Identity;
    double a = 0.0, b = 0.0;   // henon
    int dim = 1;               // identity / rotation
    double alpha = 0.0;        // rotation
    int d = 1, k = 1;          // parablender jet orders
    int n_sinks = 2;           // planted sinks

    static SystemSpec henon(double a, double b);
    static SystemSpec identity(int dim);
    static SystemSpec rotation(double alpha, int dim);
    static SystemSpec doubling();
    static SystemSpec parablender_core(int d, int k);
    static SystemSpec parablender_full(int d, int k);
    static SystemSpec planted_sinks(int n);

    int phase_dim() const;
    int param_arity() const;     // k for the parablender families, else 0
    Box phase_box() const;
    double metric_scale() const; // makes the normalized box diameter <= 2
    bool piecewise() const;
    std::string name() const;

    // cached layout for the parablender families
    const ParablenderLayout& layout() const;
};

struct Trajectory {
    std::vector<PhasePoint> points;  // points[0] is the start
    int escape_time = -1;            // index of first escaped point, -1 if none

    int n() const { return int(points.size()); }
    bool escaped() const { return escape_time >= 0; }
};

struct Mat {
    int dim = 1;
    std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

    double det() const;
};

// Branch ids: 0..card-1 are the I_delta branches (ordinal order); for the
// full family card, card+1, card+2 name I_S, I_P, I_P'.
int branch_count(const SystemSpec& sys);
std::string branch_name(const SystemSpec& sys, int branch);
// branch containing x, -1 if x is in no definition interval
int branch_of(const SystemSpec& sys, double x);

PhasePoint step(const SystemSpec& sys, const ParamPoint& a, const PhasePoint& z);
Trajectory orbit(const SystemSpec& sys, const ParamPoint& a, const PhasePoint& z0, int n);
Mat jacobian(const SystemSpec& sys, const ParamPoint& a, const PhasePoint& z);
PhasePoint inverse_branch(const SystemSpec& sys, const ParamPoint& a, const PhasePoint& z,
                          int branch);

void validate_param(const SystemSpec& sys, const ParamPoint& a);

}  // namespace emlab

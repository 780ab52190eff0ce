#pragma once

// Jet-space layer for the parablender families: truncated polynomial
// arithmetic over E(d,k), pushforward and branch inverses of C^d-jets of
// point families, the interval-certified covered-domain verification, and
// the constructive covering of constant jets by greedy pullback.

#include <string>
#include <vector>

#include "emlab/dynsys.hpp"
#include "emlab/interval.hpp"
#include "emlab/multiindex.hpp"

namespace emlab {

// Coefficient vector over E(d,k) order; products truncate at total degree d.
using PolyCoeffs = std::vector<double>;

PolyCoeffs poly_mul(const MultiIndexSet& E, const PolyCoeffs& a, const PolyCoeffs& b);
double poly_eval(const MultiIndexSet& E, const PolyCoeffs& p, const std::vector<double>& s);

// Coefficients of sum_i delta(i) a^i re-expanded in powers of (a - a0).
PolyCoeffs offset_at(const MultiIndexSet& E, const BranchSymbol& delta, const ParamPoint& a0);

// C^d-jet of a k-parameter family of phase points, E(d,k) coefficient order.
struct Jet {
    int d = 1, k = 1;
    PolyCoeffs x, y;

    static Jet constant(int d, int k, double x0, double y0);
    double base_x() const { return x[0]; }
    double base_y() const { return y[0]; }
};

// the family point at parameter a0 + s
PhasePoint jet_eval(const Jet& z, const std::vector<double>& s);

// image under the branch containing the base point (core and full families)
Jet jet_pushforward(const SystemSpec& sys, const Jet& z, const ParamPoint& a0);

// inverse of the I_delta branch on jets:
// x_0 -> x_0/q + c_delta, x_i -> x_i/q, y_i -> (y_i - offset_i(a0)) / (2/3)
Jet jet_branch_inverse(const SystemSpec& sys, const BranchSymbol& delta, const Jet& z,
                       const ParamPoint& a0);

// delta(i) = sign of y_i, ties toward +1
BranchSymbol greedy_branch(const Jet& z);

struct JetBox {
    int d = 1, k = 1;
    std::vector<Interval> x, y;  // per index, E order

    bool contains(const Jet& z) const;
};

enum class CoverVerdict { Covered, NotCovered, Inconclusive };
const char* verdict_name(CoverVerdict v);

// Certificate of the covered-domain check. The vertical branch inverses act
// on every jet coefficient independently by y -> (y - delta)/ratio, so the
// whole verification reduces to one interval problem per sign cell plus the
// horizontal contraction checks against the branch segments.
struct CoverCertificate {
    CoverVerdict verdict = CoverVerdict::Inconclusive;
    int d = 1, k = 1;
    double y_ratio = 2.0 / 3.0;

    // whether the literal unit box |x_i| <= 1/2, |y_i| <= 1 maps into itself
    // under the sign-selected branch inverses (it does not for ratio 2/3: the
    // inverse image of [0,1] under the plus branch reaches down to -3/2)
    bool paper_box_closes = false;

    double x_bound = 0.5;
    double y_bound = 0.0;  // accepted half-width when Covered
    std::vector<double> tried_y_bounds;
    Interval plus_image{0.0, 0.0};   // inverse image of [0, y_bound], delta = +1
    Interval minus_image{0.0, 0.0};  // inverse image of [-y_bound, 0], delta = -1
    int subdivision_cells = 0;

    JetBox certified;  // meaningful when Covered

    // NotCovered evidence: forward union iteration of the vertical fiber
    // develops a hole that any covered box would have to fill
    Interval gap{0.0, 0.0};
    int gap_iteration = -1;
    std::vector<std::vector<Interval>> fiber_trace;

    std::string detail;
};

CoverCertificate verify_covered_domain(int d, int k, double y_ratio = 2.0 / 3.0);

struct ConstantJetCover {
    std::vector<BranchSymbol> symbols;   // pullback order: symbols[0] pulls the target
    Jet seed;      // zero y-jet at the deepest pullback base point
    Jet achieved;  // forward image of the seed through the recorded branches
    double residual = 0.0;               // max_i |achieved.y_i - target.y_i|
    std::vector<double> residual_trace;  // distance to the pullback chain, per forward step
};

// Pull the target back `depth` times choosing branches greedily, then push a
// zero y-jet forward along the recorded symbols. The y-residual contracts by
// the vertical ratio at every step.
ConstantJetCover cover_constant_jet(const SystemSpec& sys, const Jet& target, int depth);

}  // namespace emlab

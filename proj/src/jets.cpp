#include "emlab/jets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "emlab/common.hpp"

namespace emlab {

PolyCoeffs poly_mul(const MultiIndexSet& E, const PolyCoeffs& a, const PolyCoeffs& b) {
    if (int(a.size()) != E.size() || int(b.size()) != E.size())
        throw UsageError("poly_mul: coefficient count mismatch");
    PolyCoeffs out(std::size_t(E.size()), 0.0);
    MultiIndex m(std::size_t(E.k()), 0);
    for (int s = 0; s < E.size(); ++s) {
        if (a[s] == 0.0) continue;
        for (int t = 0; t < E.size(); ++t) {
            if (b[t] == 0.0) continue;
            for (int j = 0; j < E.k(); ++j) m[j] = E.at(s)[j] + E.at(t)[j];
            int pos = E.position(m);
            if (pos >= 0) out[pos] += a[s] * b[t];
        }
    }
    return out;
}

double poly_eval(const MultiIndexSet& E, const PolyCoeffs& p, const std::vector<double>& s) {
    if (int(p.size()) != E.size()) throw UsageError("poly_eval: coefficient count mismatch");
    if (int(s.size()) != E.k()) throw UsageError("poly_eval: parameter arity mismatch");
    double acc = 0.0;
    for (int t = 0; t < E.size(); ++t) acc += p[t] * E.monomial(s, t);
    return acc;
}

namespace {

double binom(int n, int r) {
    double v = 1.0;
    for (int j = 1; j <= r; ++j) v = v * double(n - r + j) / double(j);
    return v;
}

void check_jet(const MultiIndexSet& E, const Jet& z) {
    if (z.d != E.d() || z.k != E.k()) throw UsageError("jet orders do not match the system");
    if (int(z.x.size()) != E.size() || int(z.y.size()) != E.size())
        throw UsageError("jet coefficient count mismatch");
    for (double v : z.x)
        if (!std::isfinite(v)) throw UsageError("jet coefficients must be finite");
    for (double v : z.y)
        if (!std::isfinite(v)) throw UsageError("jet coefficients must be finite");
}

const ParablenderLayout& layout_of(const SystemSpec& sys) {
    if (sys.kind != SystemKind::ParablenderCore && sys.kind != SystemKind::ParablenderFull)
        throw UsageError("jet operations apply to the parablender families only");
    return sys.layout();
}

double max_abs_diff(const PolyCoeffs& a, const PolyCoeffs& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

PolyCoeffs offset_at(const MultiIndexSet& E, const BranchSymbol& delta, const ParamPoint& a0) {
    if (delta.size() != E.size()) throw UsageError("offset_at: symbol size mismatch");
    if (int(a0.size()) != E.k()) throw UsageError("offset_at: parameter arity mismatch");
    PolyCoeffs out(std::size_t(E.size()), 0.0);
    for (int t = 0; t < E.size(); ++t) {
        const MultiIndex& m = E.at(t);
        double acc = 0.0;
        for (int s = 0; s < E.size(); ++s) {
            const MultiIndex& i = E.at(s);
            double term = double(delta.sign(s));
            bool above = true;
            for (int j = 0; j < E.k() && above; ++j) {
                if (i[j] < m[j]) {
                    above = false;
                    break;
                }
                term *= binom(i[j], m[j]) * std::pow(a0[j], i[j] - m[j]);
            }
            if (above) acc += term;
        }
        out[t] = acc;
    }
    return out;
}

Jet Jet::constant(int d, int k, double x0, double y0) {
    MultiIndexSet E(d, k);
    Jet z;
    z.d = d;
    z.k = k;
    z.x.assign(std::size_t(E.size()), 0.0);
    z.y.assign(std::size_t(E.size()), 0.0);
    z.x[0] = x0;
    z.y[0] = y0;
    return z;
}

PhasePoint jet_eval(const Jet& z, const std::vector<double>& s) {
    MultiIndexSet E(z.d, z.k);
    check_jet(E, z);
    PhasePoint p;
    p.c = {poly_eval(E, z.x, s), poly_eval(E, z.y, s)};
    return p;
}

Jet jet_pushforward(const SystemSpec& sys, const Jet& z, const ParamPoint& a0) {
    const ParablenderLayout& L = layout_of(sys);
    const MultiIndexSet& E = L.E;
    check_jet(E, z);
    validate_param(sys, a0);

    int br = branch_of(sys, z.x[0]);
    if (br < 0) throw OutOfDomainError("jet base point lies in no definition interval");

    Jet out = z;
    if (std::uint64_t(br) < L.card) {
        const IntervalSeg& seg = L.core[std::size_t(br)];
        BranchSymbol delta = BranchSymbol::from_ordinal(std::uint64_t(br), E.size());
        PolyCoeffs off = offset_at(E, delta, a0);
        for (int t = 0; t < E.size(); ++t) {
            out.x[t] = L.q * z.x[t] - (t == 0 ? L.q * seg.center() : 0.0);
            out.y[t] = (2.0 / 3.0) * z.y[t] + off[t];
        }
    } else if (br == int(L.card)) {  // I_S
        double ey = 1.0 / std::sqrt(L.I_S.length());
        for (int t = 0; t < E.size(); ++t) {
            out.x[t] = L.q_S * z.x[t] - (t == 0 ? L.q_S * L.I_S.center() : 0.0);
            out.y[t] = ey * z.y[t];
        }
    } else if (br == int(L.card) + 1) {  // I_P
        double lp = L.I_P.length();
        for (int t = 0; t < E.size(); ++t) {
            out.x[t] = L.q_P * z.x[t] - (t == 0 ? L.q_P * L.I_P.center() : 0.0);
            out.y[t] = lp * lp * z.y[t];
        }
    } else {  // I_P'
        PolyCoeffs u = z.x;
        u[0] -= L.x_Pp;
        PolyCoeffs usq = poly_mul(E, u, u);
        for (int t = 0; t < E.size(); ++t) {
            out.x[t] = z.y[t] - usq[t] + (t == 0 ? L.x_P : 0.0);
            out.y[t] = -z.x[t] + (t == 0 ? L.x_Pp : 0.0);
        }
    }
    return out;
}

Jet jet_branch_inverse(const SystemSpec& sys, const BranchSymbol& delta, const Jet& z,
                       const ParamPoint& a0) {
    const ParablenderLayout& L = layout_of(sys);
    const MultiIndexSet& E = L.E;
    check_jet(E, z);
    validate_param(sys, a0);
    if (delta.size() != E.size()) throw UsageError("branch symbol size mismatch");

    const IntervalSeg& seg = L.core[std::size_t(delta.ordinal())];
    PolyCoeffs off = offset_at(E, delta, a0);
    Jet out = z;
    for (int t = 0; t < E.size(); ++t) {
        out.x[t] = z.x[t] / L.q + (t == 0 ? seg.center() : 0.0);
        out.y[t] = (z.y[t] - off[t]) * 1.5;
    }
    return out;
}

BranchSymbol greedy_branch(const Jet& z) {
    BranchSymbol delta;
    delta.signs.reserve(z.y.size());
    for (double v : z.y) delta.signs.push_back(v >= 0.0 ? 1 : -1);
    return delta;
}

bool JetBox::contains(const Jet& z) const {
    if (z.d != d || z.k != k) return false;
    if (z.x.size() != x.size() || z.y.size() != y.size()) return false;
    for (std::size_t t = 0; t < x.size(); ++t)
        if (!x[t].contains(z.x[t]) || !y[t].contains(z.y[t])) return false;
    return true;
}

const char* verdict_name(CoverVerdict v) {
    switch (v) {
        case CoverVerdict::Covered: return "Covered";
        case CoverVerdict::NotCovered: return "NotCovered";
        case CoverVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

namespace {

// Sign-selected branch inverses must send [-by, by] into itself. Checked on
// cells of width <= 1e-3; every cell must also sit inside the forward image
// of the vertical fiber [-3,3] so the selected inverse actually exists there.
bool y_box_covers(double by, double ratio, int* cells_out) {
    int cells = std::max(2, int(std::ceil(2.0 * by / 1e-3)));
    if (cells_out) *cells_out = cells;
    Interval target(-by, by);
    for (int j = 0; j < cells; ++j) {
        double lo = -by + 2.0 * by * double(j) / cells;
        double hi = -by + 2.0 * by * double(j + 1) / cells;
        Interval cell = outward(lo, hi);
        double sgn = (lo + hi >= 0.0) ? 1.0 : -1.0;
        Interval dom(step_up(sgn - 3.0 * ratio), step_down(sgn + 3.0 * ratio));
        if (!cell.subset_of(dom)) return false;
        Interval img = idiv(isub(cell, sgn), ratio);
        if (!img.subset_of(target)) return false;
    }
    return true;
}

std::vector<Interval> merge_union(std::vector<Interval> parts) {
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const Interval& iv : parts) {
        if (!merged.empty() && iv.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    return merged;
}

}  // namespace

CoverCertificate verify_covered_domain(int d, int k, double y_ratio) {
    if (!(y_ratio > 0.0 && y_ratio < 1.0))
        throw UsageError("verify_covered_domain: vertical ratio must be in (0,1)");
    SystemSpec sys = SystemSpec::parablender_core(d, k);
    const ParablenderLayout& L = sys.layout();
    const MultiIndexSet& E = L.E;

    CoverCertificate cert;
    cert.d = d;
    cert.k = k;
    cert.y_ratio = y_ratio;

    const double xb = 0.5;
    cert.x_bound = xb;
    Interval xbox(-xb, xb);
    bool x_ok = idiv(xbox, L.q).subset_of(xbox);
    for (const IntervalSeg& seg : L.core) {
        Interval seg_iv(seg.lo, seg.hi);
        Interval img = iadd(idiv(xbox, L.q), seg.center());
        if (!img.subset_of(seg_iv) || !seg_iv.subset_of(xbox)) x_ok = false;
    }

    cert.paper_box_closes = x_ok && y_box_covers(1.0, y_ratio, nullptr);

    double by = 1.0;
    bool found = false;
    while (by <= 3.0 + 1e-9) {
        cert.tried_y_bounds.push_back(by);
        if (y_box_covers(by, y_ratio, &cert.subdivision_cells)) {
            found = true;
            break;
        }
        by *= 1.05;
    }

    char buf[160];
    if (x_ok && found) {
        cert.verdict = CoverVerdict::Covered;
        cert.y_bound = by;
        cert.plus_image = idiv(isub(Interval(0.0, by), 1.0), y_ratio);
        cert.minus_image = idiv(isub(Interval(-by, 0.0), -1.0), y_ratio);
        cert.certified.d = d;
        cert.certified.k = k;
        cert.certified.x.assign(std::size_t(E.size()), xbox);
        cert.certified.y.assign(std::size_t(E.size()), Interval(-by, by));
        std::snprintf(buf, sizeof buf,
                      "covered with |x_i| <= %.3f, |y_i| <= %.6f after %d bound candidates",
                      xb, by, int(cert.tried_y_bounds.size()));
        cert.detail = buf;
        return cert;
    }

    // No self-covering box found: iterate the forward images of the vertical
    // fiber. Outward rounding makes every union a superset of the true one,
    // so any hole that appears is a certified hole.
    std::vector<Interval> u{Interval(-3.0, 3.0)};
    for (int it = 1; it <= 200; ++it) {
        std::vector<Interval> parts;
        parts.reserve(2 * u.size());
        for (const Interval& iv : u) {
            Interval scaled = imul(iv, y_ratio);
            parts.push_back(iadd(scaled, 1.0));
            parts.push_back(iadd(scaled, -1.0));
        }
        std::vector<Interval> merged = merge_union(std::move(parts));
        if (cert.fiber_trace.size() < 32) cert.fiber_trace.push_back(merged);
        for (std::size_t g = 1; g < merged.size(); ++g) {
            double glo = merged[g - 1].hi, ghi = merged[g].lo;
            if (glo < ghi && glo < 1.0 && ghi > -1.0) {
                cert.verdict = CoverVerdict::NotCovered;
                cert.gap = Interval(glo, ghi);
                cert.gap_iteration = it;
                std::snprintf(buf, sizeof buf,
                              "fiber union develops the hole (%.9g, %.9g) at iteration %d", glo,
                              ghi, it);
                cert.detail = buf;
                return cert;
            }
        }
        bool stable = merged.size() == u.size();
        for (std::size_t i = 0; stable && i < merged.size(); ++i)
            stable = std::abs(merged[i].lo - u[i].lo) < 1e-13 &&
                     std::abs(merged[i].hi - u[i].hi) < 1e-13;
        u = std::move(merged);
        if (stable) break;
    }
    cert.verdict = CoverVerdict::Inconclusive;
    cert.detail = "no self-covering box on the candidate grid and no certified hole";
    return cert;
}

ConstantJetCover cover_constant_jet(const SystemSpec& sys, const Jet& target, int depth) {
    const ParablenderLayout& L = layout_of(sys);
    const MultiIndexSet& E = L.E;
    check_jet(E, target);
    if (depth < 0) throw UsageError("cover_constant_jet: depth must be >= 0");
    for (int t = 0; t < E.size(); ++t) {
        if (!(std::abs(target.x[t]) < 1.0))
            throw OutOfDomainError("target x coefficients must satisfy |x_i| < 1");
        if (!(std::abs(target.y[t]) < 2.0))
            throw OutOfDomainError("target y coefficients must satisfy |y_i| < 2");
    }

    ConstantJetCover out;
    ParamPoint a0(std::size_t(E.k()), 0.0);
    std::vector<Jet> chain{target};
    Jet z = target;
    for (int t = 0; t < depth; ++t) {
        BranchSymbol delta = greedy_branch(z);
        z = jet_branch_inverse(sys, delta, z, a0);
        out.symbols.push_back(delta);
        chain.push_back(z);
    }
    out.seed = z;
    std::fill(out.seed.y.begin(), out.seed.y.end(), 0.0);

    // Forward pass re-runs the y-jet dynamics only: the x-part of inverse
    // followed by forward telescopes to the identity exactly, while numeric
    // re-iteration would amplify rounding by the expansion q at every step.
    Jet state = out.seed;
    out.residual_trace.push_back(max_abs_diff(state.y, chain[std::size_t(depth)].y));
    for (int t = depth - 1; t >= 0; --t) {
        const BranchSymbol& delta = out.symbols[std::size_t(t)];
        for (int i = 0; i < E.size(); ++i)
            state.y[i] = (2.0 / 3.0) * state.y[i] + double(delta.sign(i));
        out.residual_trace.push_back(max_abs_diff(state.y, chain[std::size_t(t)].y));
    }
    out.achieved = state;
    out.achieved.x = target.x;
    out.residual = out.residual_trace.back();
    return out;
}

}  // namespace emlab

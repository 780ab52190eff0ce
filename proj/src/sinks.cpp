#include "emlab/sinks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace emlab {

const char* orbit_class_name(OrbitClass c) {
    switch (c) {
        case OrbitClass::Sink: return "sink";
        case OrbitClass::Saddle: return "saddle";
        case OrbitClass::Source: return "source";
        case OrbitClass::ProjHypSource: return "proj-hyp-source";
        case OrbitClass::NonHyperbolic: return "non-hyperbolic";
    }
    return "?";
}

OrbitClass classify_multipliers(std::complex<double> m1, std::complex<double> m2, int dim,
                                double tol) {
    double a1 = std::abs(m1);
    if (dim == 1) {
        if (a1 < 1.0 - tol) return OrbitClass::Sink;
        if (a1 > 1.0 + tol) return OrbitClass::Source;
        return OrbitClass::NonHyperbolic;
    }
    double a2 = std::abs(m2);
    double hi = std::max(a1, a2), lo = std::min(a1, a2);
    if (hi < 1.0 - tol) return OrbitClass::Sink;
    if (lo > 1.0 + tol) {
        if (hi > lo * (1.0 + tol)) return OrbitClass::ProjHypSource;
        return OrbitClass::Source;
    }
    if (hi > 1.0 + tol && lo < 1.0 - tol) return OrbitClass::Saddle;
    return OrbitClass::NonHyperbolic;
}

namespace {

Mat mat_identity(int dim) {
    Mat I;
    I.dim = dim;
    for (int i = 0; i < dim; ++i) I.m[i][i] = 1.0;
    return I;
}

Mat mat_mul(const Mat& A, const Mat& B) {
    Mat C;
    C.dim = A.dim;
    for (int i = 0; i < A.dim; ++i)
        for (int j = 0; j < A.dim; ++j) {
            double s = 0.0;
            for (int l = 0; l < A.dim; ++l) s += A.m[i][l] * B.m[l][j];
            C.m[i][j] = s;
        }
    return C;
}

double max_abs(const Mat& A) {
    double s = 0.0;
    for (int i = 0; i < A.dim; ++i)
        for (int j = 0; j < A.dim; ++j) s = std::max(s, std::abs(A.m[i][j]));
    return s;
}

struct CycleEval {
    bool escaped = false;
    std::vector<PhasePoint> points;  // the p iterates starting at z
    PhasePoint end;                  // f^p(z)
    Mat J;                           // Df^p(z), chain rule
};

// may throw SingularLocusError from jacobian()
CycleEval eval_cycle(const SystemSpec& sys, const ParamPoint& a, const PhasePoint& z, int p) {
    CycleEval ev;
    ev.J = mat_identity(sys.phase_dim());
    PhasePoint cur = z;
    for (int t = 0; t < p; ++t) {
        ev.points.push_back(cur);
        ev.J = mat_mul(jacobian(sys, a, cur), ev.J);
        cur = step(sys, a, cur);
        if (cur.escaped) {
            ev.escaped = true;
            return ev;
        }
    }
    ev.end = cur;
    return ev;
}

double residual_norm(const PhasePoint& w, const PhasePoint& z, int dim) {
    double r = 0.0;
    for (int i = 0; i < dim; ++i) r = std::max(r, std::abs(w.c[i] - z.c[i]));
    return r;
}

// multipliers of a matrix, modulus-descending; m2 = 0 in 1D
void eigenvalues(const Mat& A, std::complex<double>& m1, std::complex<double>& m2) {
    if (A.dim == 1) {
        m1 = A.m[0][0];
        m2 = 0.0;
        return;
    }
    double tr = A.m[0][0] + A.m[1][1];
    double det = A.det();
    double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        double root = std::sqrt(disc);
        double q = 0.5 * (tr + (tr >= 0.0 ? root : -root));
        double l1 = q;
        double l2 = (q != 0.0) ? det / q : 0.5 * (tr - (tr >= 0.0 ? root : -root));
        m1 = l1;
        m2 = l2;
    } else {
        double im = 0.5 * std::sqrt(-disc);
        m1 = {0.5 * tr, im};
        m2 = {0.5 * tr, -im};
    }
    if (std::abs(m2) > std::abs(m1)) std::swap(m1, m2);
}

// solve (J - I) h = -F; false when the Newton matrix is numerically singular
bool newton_step(const Mat& J, const std::array<double, 2>& F, std::array<double, 2>& h) {
    Mat A = J;
    for (int i = 0; i < A.dim; ++i) A.m[i][i] -= 1.0;
    double scale = std::max(1.0, max_abs(A));
    if (A.dim == 1) {
        if (std::abs(A.m[0][0]) < 1e-13 * scale) return false;
        h[0] = -F[0] / A.m[0][0];
        return true;
    }
    double det = A.det();
    if (std::abs(det) < 1e-13 * scale * scale) return false;
    h[0] = (-F[0] * A.m[1][1] + F[1] * A.m[0][1]) / det;
    h[1] = (-F[1] * A.m[0][0] + F[0] * A.m[1][0]) / det;
    return true;
}

bool lex_less(const PhasePoint& u, const PhasePoint& v, int dim) {
    for (int i = 0; i < dim; ++i) {
        if (u.c[i] < v.c[i]) return true;
        if (u.c[i] > v.c[i]) return false;
    }
    return false;
}

constexpr int kMaxNewtonIters = 50;
constexpr double kStepTol = 1e-12;
constexpr double kResidualTol = 1e-10;
constexpr double kDivisorTol = 1e-8;
constexpr double kDedupTol = 1e-6;
constexpr double kClassTol = 1e-6;

}  // namespace

std::optional<PeriodicOrbit> find_periodic(const SystemSpec& sys, const ParamPoint& a,
                                           PhasePoint guess, int period,
                                           NewtonDiagnostics* diag) {
    validate_param(sys, a);
    if (period < 1) throw UsageError("find_periodic: period must be >= 1");
    if (guess.escaped) throw UsageError("find_periodic: guess is escaped");
    NewtonDiagnostics local;
    NewtonDiagnostics& dg = diag ? *diag : local;
    ++dg.attempts;

    int dim = sys.phase_dim();
    Box box = sys.phase_box();
    PhasePoint z = guess;
    bool converged = false;
    try {
        for (int it = 0; it < kMaxNewtonIters; ++it) {
            CycleEval ev = eval_cycle(sys, a, z, period);
            if (ev.escaped) {
                ++dg.escaped;
                return std::nullopt;
            }
            std::array<double, 2> F{0.0, 0.0}, h{0.0, 0.0};
            for (int i = 0; i < dim; ++i) F[i] = ev.end.c[i] - z.c[i];
            if (!newton_step(ev.J, F, h)) {
                ++dg.singular_skips;
                return std::nullopt;
            }
            double hn = 0.0;
            for (int i = 0; i < dim; ++i) {
                z.c[i] += h[i];
                hn = std::max(hn, std::abs(h[i]));
            }
            if (!box.contains(z)) {
                ++dg.escaped;
                return std::nullopt;
            }
            if (hn < kStepTol) {
                converged = true;
                break;
            }
        }
        if (!converged) return std::nullopt;

        CycleEval ev = eval_cycle(sys, a, z, period);
        if (ev.escaped || residual_norm(ev.end, z, dim) > kResidualTol) return std::nullopt;
        for (int q = 1; q < period; ++q) {
            if (period % q != 0) continue;
            if (residual_norm(ev.points[q], z, dim) < kDivisorTol) {
                ++dg.divisor_rejects;
                return std::nullopt;
            }
        }

        PeriodicOrbit orb;
        orb.period = period;
        orb.points = ev.points;
        int best = 0;
        for (int t = 1; t < period; ++t)
            if (lex_less(orb.points[t], orb.points[best], dim)) best = t;
        std::rotate(orb.points.begin(), orb.points.begin() + best, orb.points.end());

        CycleEval canon = eval_cycle(sys, a, orb.points[0], period);
        if (canon.escaped) return std::nullopt;
        eigenvalues(canon.J, orb.m1, orb.m2);
        orb.det = canon.J.det();
        orb.area_contracting = std::abs(orb.det) < 1.0 - kClassTol;
        orb.cls = classify_multipliers(orb.m1, orb.m2, dim, kClassTol);
        ++dg.converged;
        return orb;
    } catch (const SingularLocusError&) {
        ++dg.singular_skips;
        return std::nullopt;
    }
}

namespace {

bool same_orbit(const PeriodicOrbit& u, const PeriodicOrbit& v, int dim) {
    if (u.period != v.period) return false;
    int p = u.period;
    for (int s = 0; s < p; ++s) {
        double worst = 0.0;
        for (int t = 0; t < p; ++t)
            worst = std::max(worst, residual_norm(u.points[t], v.points[(t + s) % p], dim));
        if (worst < kDedupTol) return true;
    }
    return false;
}

}  // namespace

CensusResult sink_census(const SystemSpec& sys, const ParamPoint& a, int max_period, int grid,
                         int threads) {
    validate_param(sys, a);
    if (max_period < 1) throw UsageError("sink_census: max_period must be >= 1");
    if (grid < 2) throw UsageError("sink_census: grid must be >= 2");
    if (threads < 1) throw UsageError("sink_census: threads must be >= 1");

    CensusResult out;
    out.max_period = max_period;
    out.grid = grid;

    int dim = sys.phase_dim();
    Box box = sys.phase_box();
    std::vector<PhasePoint> seeds;
    if (dim == 1) {
        seeds.reserve(grid);
        for (int i = 0; i < grid; ++i) {
            PhasePoint z;
            z.c[0] = box.lo[0] + (i + 0.5) / grid * (box.hi[0] - box.lo[0]);
            seeds.push_back(z);
        }
    } else {
        seeds.reserve(std::size_t(grid) * grid);
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j) {
                PhasePoint z;
                z.c[0] = box.lo[0] + (i + 0.5) / grid * (box.hi[0] - box.lo[0]);
                z.c[1] = box.lo[1] + (j + 0.5) / grid * (box.hi[1] - box.lo[1]);
                seeds.push_back(z);
            }
    }

    struct SeedHits {
        std::vector<PeriodicOrbit> orbits;
        NewtonDiagnostics diag;
    };
    std::vector<SeedHits> hits(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t s) {
        for (int p = 1; p <= max_period; ++p) {
            auto orb = find_periodic(sys, a, seeds[s], p, &hits[s].diag);
            if (orb) hits[s].orbits.push_back(std::move(*orb));
        }
    });

    for (const auto& h : hits) {
        out.diag.attempts += h.diag.attempts;
        out.diag.converged += h.diag.converged;
        out.diag.singular_skips += h.diag.singular_skips;
        out.diag.escaped += h.diag.escaped;
        out.diag.divisor_rejects += h.diag.divisor_rejects;
        for (const auto& orb : h.orbits) {
            bool dup = false;
            for (const auto& have : out.orbits)
                if (same_orbit(orb, have, dim)) {
                    dup = true;
                    break;
                }
            if (dup) {
                ++out.diag.duplicates;
                continue;
            }
            out.orbits.push_back(orb);
        }
    }

    std::sort(out.orbits.begin(), out.orbits.end(),
              [&](const PeriodicOrbit& u, const PeriodicOrbit& v) {
                  if (u.period != v.period) return u.period < v.period;
                  return lex_less(u.rep(), v.rep(), dim);
              });
    for (const auto& orb : out.orbits)
        if (orb.cls == OrbitClass::Sink) out.sinks.push_back(orb);
    return out;
}

BasinEstimate basin_measure_estimate(const SystemSpec& sys, const ParamPoint& a,
                                     const PeriodicOrbit& orbit, int n_steps, int samples,
                                     std::uint64_t seed) {
    validate_param(sys, a);
    if (orbit.points.empty() || int(orbit.points.size()) != orbit.period)
        throw UsageError("basin_measure_estimate: orbit has no point list");
    if (n_steps < 1) throw UsageError("basin_measure_estimate: n_steps must be >= 1");
    if (samples < 1) throw UsageError("basin_measure_estimate: samples must be >= 1");

    int dim = sys.phase_dim();
    Box box = sys.phase_box();
    Rng rng(seed);
    const double tube = 1e-6;

    int inside = 0;
    for (int s = 0; s < samples; ++s) {
        PhasePoint z;
        for (int i = 0; i < dim; ++i) z.c[i] = rng.uniform(box.lo[i], box.hi[i]);
        bool captured = false;
        for (int t = 0; t <= n_steps && !captured; ++t) {
            for (const auto& w : orbit.points)
                if (residual_norm(z, w, dim) <= tube) {
                    captured = true;
                    break;
                }
            if (captured || t == n_steps) break;
            z = step(sys, a, z);
            if (z.escaped) break;
        }
        if (captured) ++inside;
    }

    BasinEstimate est;
    est.fraction = double(inside) / samples;
    est.samples = samples;
    est.n_steps = n_steps;
    est.limit.dim = dim;
    for (const auto& w : orbit.points) {
        std::array<double, 2> at{w.c[0], dim > 1 ? w.c[1] : 0.0};
        est.limit.atoms.push_back(at);
        est.limit.weights.push_back(1.0 / orbit.period);
    }
    est.limit.validate();
    return est;
}

}  // namespace emlab

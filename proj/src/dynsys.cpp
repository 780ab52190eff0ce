#include "emlab/dynsys.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>

namespace emlab {

double Box::diameter() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    return std::sqrt(s);
}

double Mat::det() const {
    if (dim == 1) return m[0][0];
    return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

SystemSpec SystemSpec::henon(double a, double b) {
    SystemSpec s;
    s.kind = SystemKind::Henon;
    s.a = a;
    s.b = b;
    return s;
}
SystemSpec SystemSpec::identity(int dim) {
    if (dim != 1 && dim != 2) throw UsageError("identity: dim must be 1 or 2");
    SystemSpec s;
    s.kind = SystemKind::Identity;
    s.dim = dim;
    return s;
}
SystemSpec SystemSpec::rotation(double alpha, int dim) {
    if (dim != 1 && dim != 2) throw UsageError("rotation: dim must be 1 or 2");
    SystemSpec s;
    s.kind = SystemKind::Rotation;
    s.alpha = alpha;
    s.dim = dim;
    return s;
}
SystemSpec SystemSpec::doubling() {
    SystemSpec s;
    s.kind = SystemKind::Doubling;
    s.dim = 1;
    return s;
}
static void check_jet_orders(int d, int k) {
    if (d < 0 || k < 1) throw UsageError("parablender: need d >= 0 and k >= 1");
    MultiIndexSet E(d, k);
    if (E.size() > 12)
        throw UsageError("parablender: |E| = " + std::to_string(E.size()) +
                         " exceeds the supported bound 12");
}
SystemSpec SystemSpec::parablender_core(int d, int k) {
    check_jet_orders(d, k);
    SystemSpec s;
    s.kind = SystemKind::ParablenderCore;
    s.d = d;
    s.k = k;
    return s;
}
SystemSpec SystemSpec::parablender_full(int d, int k) {
    check_jet_orders(d, k);
    SystemSpec s;
    s.kind = SystemKind::ParablenderFull;
    s.d = d;
    s.k = k;
    return s;
}
SystemSpec SystemSpec::planted_sinks(int n) {
    if (n < 1 || n > 64) throw UsageError("planted_sinks: n must be in 1..64");
    SystemSpec s;
    s.kind = SystemKind::PlantedSinks;
    s.n_sinks = n;
    return s;
}

int SystemSpec::phase_dim() const {
    switch (kind) {
        case SystemKind::Henon:
        case SystemKind::ParablenderCore:
        case SystemKind::ParablenderFull:
        case SystemKind::PlantedSinks:
            return 2;
        case SystemKind::Doubling:
            return 1;
        case SystemKind::Identity:
        case SystemKind::Rotation:
            return dim;
    }
    return 1;
}

int SystemSpec::param_arity() const {
    if (kind == SystemKind::ParablenderCore || kind == SystemKind::ParablenderFull) return k;
    return 0;
}

Box SystemSpec::phase_box() const {
    Box box;
    box.dim = phase_dim();
    switch (kind) {
        case SystemKind::Henon:
            box.lo = {-4.0, -4.0};
            box.hi = {4.0, 4.0};
            break;
        case SystemKind::ParablenderCore:
        case SystemKind::ParablenderFull:
            box.lo = {-1.0, -4.0};
            box.hi = {1.0, 4.0};
            break;
        default:
            box.lo = {0.0, 0.0};
            box.hi = {1.0, 1.0};
            break;
    }
    return box;
}

double SystemSpec::metric_scale() const {
    double diam = phase_box().diameter();
    return diam > 2.0 ? 2.0 / diam : 1.0;
}

bool SystemSpec::piecewise() const {
    return kind == SystemKind::ParablenderCore || kind == SystemKind::ParablenderFull ||
           kind == SystemKind::PlantedSinks;
}

std::string SystemSpec::name() const {
    switch (kind) {
        case SystemKind::Henon:
            return "henon(a=" + format_double(a) + ",b=" + format_double(b) + ")";
        case SystemKind::Identity:
            return "identity(dim=" + std::to_string(dim) + ")";
        case SystemKind::Rotation:
            return "rotation(alpha=" + format_double(alpha) + ",dim=" + std::to_string(dim) + ")";
        case SystemKind::Doubling:
            return "doubling";
        case SystemKind::ParablenderCore:
            return "parablender_core(d=" + std::to_string(d) + ",k=" + std::to_string(k) + ")";
        case SystemKind::ParablenderFull:
            return "parablender_full(d=" + std::to_string(d) + ",k=" + std::to_string(k) + ")";
        case SystemKind::PlantedSinks:
            return "planted_sinks(n=" + std::to_string(n_sinks) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// parablender interval layout

static ParablenderLayout build_layout(const SystemSpec& sys) {
    ParablenderLayout L(MultiIndexSet(sys.d, sys.k));
    L.card = card_delta(L.E);
    L.full = sys.kind == SystemKind::ParablenderFull;

    // CardDelta equal-length intervals, half on each side of 0, spaced evenly
    // inside [-1/2, -margin] u [margin, 1/2]. The full family reserves
    // [-1/16, 1/16] around 0 for I_S, the core keeps the intervals out of a
    // small neighbourhood of 0.
    double margin = L.full ? 1.0 / 16.0 : 1.0 / 100.0;
    double len = 1.0 / (2.0 * double(L.card) + 2.0);
    std::uint64_t half = L.card / 2;
    double block = (0.5 - margin) / double(half);
    if (L.card == 1) {
        // d = 0, k irrelevant degenerate case never reaches here (card = 2^|E| >= 2)
        throw UsageError("parablender: CardDelta must be >= 2");
    }
    L.core.resize(L.card);
    for (std::uint64_t j = 0; j < L.card; ++j) {
        double c;
        if (j < half) {  // left block, left to right
            c = -0.5 + (double(j) + 0.5) * block;
        } else {  // right block
            c = margin + (double(j - half) + 0.5) * block;
        }
        L.core[j] = IntervalSeg{c - 0.5 * len, c + 0.5 * len};
    }
    L.q = 2.0 / len;

    if (L.full) {
        L.I_S = IntervalSeg{-1.0 / 32.0, 1.0 / 32.0};
        L.q_S = 2.0 / L.I_S.length();  // 32
        L.x_S = 0.0;                   // fixed point of Q|I_S, Q(x) = 32 x
        L.I_P = IntervalSeg{0.55, 0.65};
        L.q_P = 2.0 / L.I_P.length();  // 20
        // Q(x) = q (x - c): fixed point x = q c / (q - 1)
        L.x_P = L.q_P * L.I_P.center() / (L.q_P - 1.0);
        L.I_Pp = IntervalSeg{0.75, 0.85};
        L.q_Pp = 2.0 / L.I_Pp.length();
        // preimage of x_P under Q|I_P'
        L.x_Pp = L.I_Pp.center() + L.x_P / L.q_Pp;
    }
    return L;
}

const ParablenderLayout& SystemSpec::layout() const {
    if (kind != SystemKind::ParablenderCore && kind != SystemKind::ParablenderFull)
        throw UsageError("layout: not a parablender system");
    static std::map<std::tuple<int, int, int>, ParablenderLayout> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(int(kind), d, k);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_layout(*this)).first;
    return it->second;
}

int branch_count(const SystemSpec& sys) {
    switch (sys.kind) {
        case SystemKind::ParablenderCore:
            return int(sys.layout().card);
        case SystemKind::ParablenderFull:
            return int(sys.layout().card) + 3;
        case SystemKind::PlantedSinks:
            return sys.n_sinks;
        default:
            return 1;
    }
}

std::string branch_name(const SystemSpec& sys, int branch) {
    if (sys.kind == SystemKind::ParablenderCore || sys.kind == SystemKind::ParablenderFull) {
        const auto& L = sys.layout();
        if (branch >= 0 && std::uint64_t(branch) < L.card)
            return "I[" + BranchSymbol::from_ordinal(branch, L.E.size()).to_string() + "]";
        if (sys.kind == SystemKind::ParablenderFull) {
            if (branch == int(L.card)) return "I_S";
            if (branch == int(L.card) + 1) return "I_P";
            if (branch == int(L.card) + 2) return "I_P'";
        }
    }
    return "branch" + std::to_string(branch);
}

int branch_of(const SystemSpec& sys, double x) {
    if (sys.kind == SystemKind::PlantedSinks) {
        if (x < 0.0 || x > 1.0) return -1;
        int j = int(std::floor(x * sys.n_sinks));
        if (j >= sys.n_sinks) j = sys.n_sinks - 1;
        return j;
    }
    if (sys.kind != SystemKind::ParablenderCore && sys.kind != SystemKind::ParablenderFull)
        return 0;
    const auto& L = sys.layout();
    for (std::uint64_t j = 0; j < L.card; ++j)
        if (L.core[j].contains(x)) return int(j);
    if (L.full) {
        if (L.I_S.contains(x)) return int(L.card);
        if (L.I_P.contains(x)) return int(L.card) + 1;
        if (L.I_Pp.contains(x)) return int(L.card) + 2;
    }
    return -1;
}

void validate_param(const SystemSpec& sys, const ParamPoint& a) {
    if (int(a.size()) != sys.param_arity())
        throw UsageError("param arity mismatch: system " + sys.name() + " expects " +
                         std::to_string(sys.param_arity()) + " parameters, got " +
                         std::to_string(a.size()));
    for (double v : a)
        if (!(v >= -1.0 && v <= 1.0)) throw UsageError("param entries must lie in [-1,1]");
}

// offset_delta(a) = sum_{i in E} delta(i) a^i with 0^0 = 1
static double branch_offset(const ParablenderLayout& L, const BranchSymbol& delta,
                            const ParamPoint& a) {
    double s = 0.0;
    for (int t = 0; t < L.E.size(); ++t) s += double(delta.sign(t)) * L.E.monomial(a, t);
    return s;
}

static PhasePoint escaped_at(const PhasePoint& image) {
    PhasePoint z = image;
    z.escaped = true;
    return z;
}

PhasePoint step(const SystemSpec& sys, const ParamPoint& a, const PhasePoint& z) {
    validate_param(sys, a);
    if (z.escaped) throw UsageError("step: input point is escaped");
    Box box = sys.phase_box();
    PhasePoint w;
    switch (sys.kind) {
        case SystemKind::Henon: {
            w.c = {z.x() * z.x() + sys.a + z.y(), -sys.b * z.x()};
            break;
        }
        case SystemKind::Identity: {
            w = z;
            break;
        }
        case SystemKind::Rotation: {
            double x = z.x() + sys.alpha;
            x -= std::floor(x);
            w.c = {x, z.y()};
            break;
        }
        case SystemKind::Doubling: {
            double x = 2.0 * z.x();
            x -= std::floor(x);
            w.c = {x, 0.0};
            break;
        }
        case SystemKind::PlantedSinks: {
            int j = branch_of(sys, z.x());
            if (j < 0) return escaped_at(z);
            double cx = (j + 0.5) / sys.n_sinks, cy = 0.5;
            w.c = {cx + 0.5 * (z.x() - cx), cy + 0.5 * (z.y() - cy)};
            break;
        }
        case SystemKind::ParablenderCore:
        case SystemKind::ParablenderFull: {
            const auto& L = sys.layout();
            int br = branch_of(sys, z.x());
            if (br < 0) return escaped_at(z);
            if (std::uint64_t(br) < L.card) {
                const auto& seg = L.core[br];
                BranchSymbol delta = BranchSymbol::from_ordinal(br, L.E.size());
                w.c = {L.q * (z.x() - seg.center()),
                       (2.0 / 3.0) * z.y() + branch_offset(L, delta, a)};
            } else if (br == int(L.card)) {  // I_S
                w.c = {L.q_S * (z.x() - L.I_S.center()), z.y() / std::sqrt(L.I_S.length())};
            } else if (br == int(L.card) + 1) {  // I_P
                double lp = L.I_P.length();
                w.c = {L.q_P * (z.x() - L.I_P.center()), lp * lp * z.y()};
            } else {  // I_P'
                double u = z.x() - L.x_Pp;
                w.c = {z.y() - u * u + L.x_P, L.x_Pp - z.x()};
            }
            break;
        }
    }
    if (!box.contains(w)) return escaped_at(w);
    return w;
}

Trajectory orbit(const SystemSpec& sys, const ParamPoint& a, const PhasePoint& z0, int n) {
    validate_param(sys, a);
    if (n < 1) throw UsageError("orbit: n must be >= 1");
    Trajectory traj;
    traj.points.reserve(n);
    PhasePoint z = z0;
    if (!z.escaped && !sys.phase_box().contains(z)) z.escaped = true;
    for (int t = 0; t < n; ++t) {
        traj.points.push_back(z);
        if (z.escaped && traj.escape_time < 0) traj.escape_time = t;
        if (t + 1 < n && !z.escaped) z = step(sys, a, z);
    }
    return traj;
}

Mat jacobian(const SystemSpec& sys, const ParamPoint& a, const PhasePoint& z) {
    validate_param(sys, a);
    if (z.escaped) throw UsageError("jacobian: input point is escaped");
    Mat J;
    J.dim = sys.phase_dim();
    switch (sys.kind) {
        case SystemKind::Henon:
            J.m = {{{2.0 * z.x(), 1.0}, {-sys.b, 0.0}}};
            break;
        case SystemKind::Identity:
            J.m = {{{1.0, 0.0}, {0.0, 1.0}}};
            break;
        case SystemKind::Rotation:
            J.m = {{{1.0, 0.0}, {0.0, 1.0}}};
            break;
        case SystemKind::Doubling:
            J.m = {{{2.0, 0.0}, {0.0, 0.0}}};
            break;
        case SystemKind::PlantedSinks: {
            double xs = z.x() * sys.n_sinks;
            if (xs == std::floor(xs) && xs != 0.0 && xs != double(sys.n_sinks))
                throw SingularLocusError("jacobian: point on a cell boundary");
            if (branch_of(sys, z.x()) < 0) throw UsageError("jacobian: point outside [0,1]^2");
            J.m = {{{0.5, 0.0}, {0.0, 0.5}}};
            break;
        }
        case SystemKind::ParablenderCore:
        case SystemKind::ParablenderFull: {
            const auto& L = sys.layout();
            int br = branch_of(sys, z.x());
            if (br < 0) throw SingularLocusError("jacobian: x outside the definition intervals");
            auto on_boundary = [&](const IntervalSeg& s) { return z.x() == s.lo || z.x() == s.hi; };
            if (std::uint64_t(br) < L.card) {
                if (on_boundary(L.core[br]))
                    throw SingularLocusError("jacobian: point on a branch boundary");
                J.m = {{{L.q, 0.0}, {0.0, 2.0 / 3.0}}};
            } else if (br == int(L.card)) {
                if (on_boundary(L.I_S))
                    throw SingularLocusError("jacobian: point on a branch boundary");
                J.m = {{{L.q_S, 0.0}, {0.0, 1.0 / std::sqrt(L.I_S.length())}}};
            } else if (br == int(L.card) + 1) {
                if (on_boundary(L.I_P))
                    throw SingularLocusError("jacobian: point on a branch boundary");
                double lp = L.I_P.length();
                J.m = {{{L.q_P, 0.0}, {0.0, lp * lp}}};
            } else {
                if (on_boundary(L.I_Pp))
                    throw SingularLocusError("jacobian: point on a branch boundary");
                J.m = {{{-2.0 * (z.x() - L.x_Pp), 1.0}, {-1.0, 0.0}}};
            }
            break;
        }
    }
    return J;
}

PhasePoint inverse_branch(const SystemSpec& sys, const ParamPoint& a, const PhasePoint& z,
                          int branch) {
    validate_param(sys, a);
    if (sys.kind != SystemKind::ParablenderCore && sys.kind != SystemKind::ParablenderFull)
        throw UsageError("inverse_branch: only defined for the parablender families");
    if (z.escaped) throw UsageError("inverse_branch: input point is escaped");
    const auto& L = sys.layout();
    if (branch < 0 || branch >= branch_count(sys))
        throw UsageError("inverse_branch: branch id out of range");
    PhasePoint w;
    if (std::uint64_t(branch) < L.card) {
        const auto& seg = L.core[branch];
        BranchSymbol delta = BranchSymbol::from_ordinal(branch, L.E.size());
        w.c = {z.x() / L.q + seg.center(), 1.5 * (z.y() - branch_offset(L, delta, a))};
        if (!seg.contains(w.x()) || std::abs(w.y()) > 3.0)
            throw NoPreimageError("inverse_branch: point outside the image of " +
                                  branch_name(sys, branch));
    } else if (branch == int(L.card)) {
        w.c = {z.x() / L.q_S + L.I_S.center(), z.y() * std::sqrt(L.I_S.length())};
        if (!L.I_S.contains(w.x()) || std::abs(w.y()) > 3.0)
            throw NoPreimageError("inverse_branch: point outside the image of I_S");
    } else if (branch == int(L.card) + 1) {
        double lp = L.I_P.length();
        w.c = {z.x() / L.q_P + L.I_P.center(), z.y() / (lp * lp)};
        if (!L.I_P.contains(w.x()) || std::abs(w.y()) > 3.0)
            throw NoPreimageError("inverse_branch: point outside the image of I_P");
    } else {
        // forward: (x,y) -> (y - (x - x_P')^2 + x_P, x_P' - x)
        double px = L.x_Pp - z.y();
        double py = z.x() - L.x_P + z.y() * z.y();
        w.c = {px, py};
        if (!L.I_Pp.contains(px) || std::abs(py) > 3.0)
            throw NoPreimageError("inverse_branch: point outside the image of I_P'");
    }
    return w;
}

}  // namespace emlab

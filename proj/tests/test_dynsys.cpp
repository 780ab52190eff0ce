#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "emlab/dynsys.hpp"
#include "oracles.hpp"

using namespace emlab;

TEST_CASE("henon step matches the closed form") {
    auto sys = SystemSpec::henon(1.4, 0.3);
    PhasePoint z;
    z.c = {0.0, 0.0};
    auto w = step(sys, {}, z);
    CHECK(w.x() == 1.4);
    CHECK(w.y() == 0.0);
    CHECK_FALSE(w.escaped);

    z.c = {0.5, -0.2};
    w = step(sys, {}, z);
    CHECK(w.x() == doctest::Approx(0.5 * 0.5 + 1.4 - 0.2).epsilon(1e-15));
    CHECK(w.y() == doctest::Approx(-0.15).epsilon(1e-15));
}

TEST_CASE("henon fixed points of the a=0 family") {
    auto sys = SystemSpec::henon(0.0, 0.3);
    for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{1.3, -0.39}}) {
        PhasePoint z;
        z.c = {x, y};
        auto w = step(sys, {}, z);
        CHECK(std::abs(w.x() - x) < 1e-12);
        CHECK(std::abs(w.y() - y) < 1e-12);
    }
}

TEST_CASE("identity orbit repeats the start") {
    auto sys = SystemSpec::identity(2);
    PhasePoint z;
    z.c = {0.3, 0.7};
    auto traj = orbit(sys, {}, z, 4);
    REQUIRE(traj.n() == 4);
    for (const auto& p : traj.points) {
        CHECK(p.x() == 0.3);
        CHECK(p.y() == 0.7);
    }
    CHECK_FALSE(traj.escaped());
}

TEST_CASE("quarter rotation has exact period four") {
    auto sys = SystemSpec::rotation(0.25, 1);
    PhasePoint z;
    z.c = {0.0, 0.0};
    auto traj = orbit(sys, {}, z, 5);
    CHECK(traj.points[0].x() == 0.0);
    CHECK(traj.points[1].x() == 0.25);
    CHECK(traj.points[2].x() == 0.5);
    CHECK(traj.points[3].x() == 0.75);
    CHECK(traj.points[4].x() == 0.0);
}

TEST_CASE("cylinder rotation moves only the first coordinate") {
    auto sys = SystemSpec::rotation(0.3, 2);
    PhasePoint z;
    z.c = {0.9, 0.4};
    auto w = step(sys, {}, z);
    CHECK(w.x() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(w.y() == 0.4);
}

TEST_CASE("doubling on dyadics is exact") {
    auto sys = SystemSpec::doubling();
    PhasePoint z;
    z.c = {0.375, 0.0};
    auto traj = orbit(sys, {}, z, 4);
    CHECK(traj.points[1].x() == 0.75);
    CHECK(traj.points[2].x() == 0.5);
    CHECK(traj.points[3].x() == 0.0);
}

TEST_CASE("escape produces a repeating sentinel") {
    auto sys = SystemSpec::henon(1.4, 0.3);
    PhasePoint z;
    z.c = {3.9, 0.0};
    auto traj = orbit(sys, {}, z, 6);
    REQUIRE(traj.escaped());
    CHECK(traj.escape_time >= 1);
    for (int t = traj.escape_time; t < traj.n(); ++t) {
        CHECK(traj.points[t].escaped);
        CHECK(traj.points[t].c == traj.points[traj.escape_time].c);
    }
}

TEST_CASE("jacobians agree with central differences") {
    Rng rng(42);
    std::vector<SystemSpec> systems = {
        SystemSpec::henon(1.4, 0.3),     SystemSpec::identity(2),
        SystemSpec::rotation(0.3, 2),    SystemSpec::doubling(),
        SystemSpec::planted_sinks(4),    SystemSpec::parablender_core(1, 1),
        SystemSpec::parablender_full(1, 1),
    };
    const double h = 1e-6;
    for (const auto& sys : systems) {
        ParamPoint a(sys.param_arity(), 0.25);
        int checked = 0;
        for (int trial = 0; trial < 400 && checked < 100; ++trial) {
            PhasePoint z;
            Box box = sys.phase_box();
            for (int c = 0; c < box.dim; ++c) z.c[c] = rng.uniform(box.lo[c], box.hi[c]);
            // keep clear of branch boundaries and escape regions
            if (sys.piecewise()) {
                int br = branch_of(sys, z.x());
                if (br < 0) continue;
            }
            if (sys.kind == SystemKind::Henon && std::abs(step(sys, {}, z).x()) > 3.9) continue;
            if (sys.kind == SystemKind::ParablenderCore || sys.kind == SystemKind::ParablenderFull) {
                // stay in the open branch interval by at least h
                const auto& L = sys.layout();
                int br = branch_of(sys, z.x());
                IntervalSeg seg;
                if (std::uint64_t(br) < L.card) seg = L.core[br];
                else if (br == int(L.card)) seg = L.I_S;
                else if (br == int(L.card) + 1) seg = L.I_P;
                else seg = L.I_Pp;
                if (z.x() - seg.lo < 2 * h || seg.hi - z.x() < 2 * h) continue;
            }
            if (sys.kind == SystemKind::PlantedSinks) {
                double xs = z.x() * sys.n_sinks;
                if (std::abs(xs - std::round(xs)) * sys.n_sinks < 2 * h) continue;
            }
            Mat J = jacobian(sys, a, z);
            Mat Jd = oracles::central_diff_jacobian(sys, a, z, h);
            for (int r = 0; r < J.dim; ++r)
                for (int c = 0; c < J.dim; ++c)
                    CHECK(std::abs(J.m[r][c] - Jd.m[r][c]) < 1e-6);
            ++checked;
        }
        CHECK(checked >= 50);
    }
}

TEST_CASE("parablender core step and offsets at a = 0") {
    auto sys = SystemSpec::parablender_core(1, 1);
    const auto& L = sys.layout();
    REQUIRE(L.E.size() == 2);  // indices (0), (1)
    REQUIRE(L.card == 4);
    ParamPoint a = {0.0};
    for (std::uint64_t br = 0; br < L.card; ++br) {
        BranchSymbol delta = BranchSymbol::from_ordinal(br, L.E.size());
        PhasePoint z;
        z.c = {L.core[br].center(), 0.9};
        auto w = step(sys, a, z);
        // Q maps the center to 0; offset at a=0 is the sign of the zero index
        CHECK(std::abs(w.x()) < 1e-12);
        CHECK(w.y() == doctest::Approx((2.0 / 3.0) * 0.9 + delta.sign(0)).epsilon(1e-14));
    }
}

TEST_CASE("parablender vertical contraction factor is 2/3") {
    auto sys = SystemSpec::parablender_core(2, 1);
    const auto& L = sys.layout();
    ParamPoint a = {0.5};
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::uint64_t br = rng.next_below(L.card);
        double x = L.core[br].center() + (rng.next_double() - 0.5) * 0.5 * L.core[br].length();
        double y1 = rng.uniform(-3.0, 3.0), y2 = rng.uniform(-3.0, 3.0);
        PhasePoint z1, z2;
        z1.c = {x, y1};
        z2.c = {x, y2};
        auto w1p = step(sys, a, z1);
        auto w2p = step(sys, a, z2);
        if (y1 == y2) continue;
        double ratio = std::abs(w1p.y() - w2p.y()) / std::abs(y1 - y2);
        CHECK(ratio == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("points off the definition intervals escape") {
    auto sys = SystemSpec::parablender_core(1, 1);
    PhasePoint z;
    z.c = {0.0, 0.5};  // 0 is never in a core interval
    REQUIRE(branch_of(sys, 0.0) == -1);
    auto w = step(sys, {0.0}, z);
    CHECK(w.escaped);
}

TEST_CASE("inverse_branch inverts step on every branch") {
    for (auto sys : {SystemSpec::parablender_core(1, 1), SystemSpec::parablender_full(1, 1)}) {
        ParamPoint a = {0.25};
        Rng rng(11);
        const auto& L = sys.layout();
        int nb = branch_count(sys);
        for (int br = 0; br < nb; ++br) {
            IntervalSeg seg;
            if (std::uint64_t(br) < L.card) seg = L.core[br];
            else if (br == int(L.card)) seg = L.I_S;
            else if (br == int(L.card) + 1) seg = L.I_P;
            else seg = L.I_Pp;
            int done = 0;
            for (int trial = 0; trial < 8000 && done < 1000; ++trial) {
                PhasePoint pre;
                pre.c = {rng.uniform(seg.lo, seg.hi), rng.uniform(-3.0, 3.0)};
                auto z = step(sys, a, pre);
                if (z.escaped) continue;  // image may leave the phase box (I_P')
                auto back = inverse_branch(sys, a, z, br);
                CHECK(std::abs(back.x() - pre.x()) < 1e-12);
                CHECK(std::abs(back.y() - pre.y()) < 1e-12);
                ++done;
            }
            CHECK(done >= 1000);
        }
    }
}

TEST_CASE("inverse_branch rejects points outside the branch image") {
    auto sys = SystemSpec::parablender_core(1, 1);
    PhasePoint z;
    z.c = {0.5, 3.9};
    ParamPoint a = {0.0};
    // branch 3 is ++, offset +1 at a=0, so the preimage y = 1.5*(3.9-1) > 3
    CHECK_THROWS_AS(inverse_branch(sys, a, z, 3), NoPreimageError);
    CHECK_THROWS_AS(inverse_branch(SystemSpec::henon(0, 0.3), {}, z, 0), UsageError);
}

TEST_CASE("jacobian errors on branch boundaries") {
    auto sys = SystemSpec::parablender_core(1, 1);
    const auto& L = sys.layout();
    PhasePoint z;
    z.c = {L.core[0].lo, 0.0};
    CHECK_THROWS_AS(jacobian(sys, {0.0}, z), SingularLocusError);

    auto ps = SystemSpec::planted_sinks(4);
    PhasePoint q;
    q.c = {0.25, 0.5};
    CHECK_THROWS_AS(jacobian(ps, {}, q), SingularLocusError);
}

TEST_CASE("parameter validation") {
    auto sys = SystemSpec::parablender_core(1, 2);
    PhasePoint z;
    z.c = {0.3, 0.0};
    CHECK_THROWS_AS(step(sys, {0.0}, z), UsageError);            // arity 2 expected
    CHECK_THROWS_AS(step(sys, {0.0, 1.5}, z), UsageError);       // out of [-1,1]
    CHECK_THROWS_AS(step(SystemSpec::doubling(), {0.1}, z), UsageError);
}

TEST_CASE("layout geometry invariants") {
    for (auto sys : {SystemSpec::parablender_core(1, 1), SystemSpec::parablender_core(2, 1),
                     SystemSpec::parablender_core(1, 2), SystemSpec::parablender_full(1, 1),
                     SystemSpec::parablender_full(2, 2)}) {
        const auto& L = sys.layout();
        // |E| = binom(d+k, k)
        auto binom = [](int n, int r) {
            long v = 1;
            for (int t = 1; t <= r; ++t) v = v * (n - r + t) / t;
            return v;
        };
        CHECK(L.E.size() == binom(sys.d + sys.k, sys.k));
        CHECK(L.card == (std::uint64_t(1) << L.E.size()));
        std::vector<IntervalSeg> all = L.core;
        if (L.full) {
            all.push_back(L.I_S);
            all.push_back(L.I_P);
            all.push_back(L.I_Pp);
        }
        for (std::size_t i = 0; i < all.size(); ++i) {
            CHECK(all[i].lo < all[i].hi);
            CHECK(all[i].lo >= -1.0);
            CHECK(all[i].hi <= 1.0);
            for (std::size_t j = i + 1; j < all.size(); ++j) {
                bool disjoint = all[i].hi < all[j].lo || all[j].hi < all[i].lo;
                CHECK(disjoint);
            }
        }
        for (const auto& seg : L.core) {
            CHECK(seg.lo >= -0.5);
            CHECK(seg.hi <= 0.5);
            CHECK((seg.hi < 0.0 || seg.lo > 0.0));  // core intervals avoid 0
        }
        if (L.full) {
            CHECK(L.I_S.center() == 0.0);
            CHECK(L.I_S.length() == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
            // x_P is the fixed point of Q on I_P
            CHECK(L.q_P * (L.x_P - L.I_P.center()) == doctest::Approx(L.x_P).epsilon(1e-12));
            CHECK(L.I_P.contains(L.x_P));
            // Q on I_P' maps x_P' to x_P
            CHECK(L.q_Pp * (L.x_Pp - L.I_Pp.center()) == doctest::Approx(L.x_P).epsilon(1e-12));
            CHECK(L.I_Pp.contains(L.x_Pp));
        }
    }
}

TEST_CASE("full family special branches") {
    auto sys = SystemSpec::parablender_full(1, 1);
    const auto& L = sys.layout();
    ParamPoint a = {0.0};

    // source fixed point (0,0), multipliers 32 and 4
    PhasePoint s;
    s.c = {0.0, 0.0};
    auto w = step(sys, a, s);
    CHECK(w.x() == 0.0);
    CHECK(w.y() == 0.0);
    Mat J = jacobian(sys, a, s);
    CHECK(J.m[0][0] == doctest::Approx(32.0));
    CHECK(J.m[1][1] == doctest::Approx(4.0));

    // saddle fixed point (x_P, 0), multipliers 20 and |I_P|^2 = 0.01
    PhasePoint p;
    p.c = {L.x_P, 0.0};
    w = step(sys, a, p);
    CHECK(w.x() == doctest::Approx(L.x_P).epsilon(1e-12));
    CHECK(w.y() == 0.0);
    J = jacobian(sys, a, p);
    CHECK(J.m[0][0] == doctest::Approx(20.0));
    CHECK(J.m[1][1] == doctest::Approx(0.01));

    // I_P' sends (x_P', 0) to the saddle
    PhasePoint pp;
    pp.c = {L.x_Pp, 0.0};
    w = step(sys, a, pp);
    CHECK(w.x() == doctest::Approx(L.x_P).epsilon(1e-12));
    CHECK(std::abs(w.y()) < 1e-12);
}

TEST_CASE("planted sinks contract to cell centers") {
    auto sys = SystemSpec::planted_sinks(4);
    for (int j = 0; j < 4; ++j) {
        PhasePoint c;
        c.c = {(j + 0.5) / 4.0, 0.5};
        auto w = step(sys, {}, c);
        CHECK(w.x() == c.x());
        CHECK(w.y() == c.y());
    }
    PhasePoint z;
    z.c = {0.1, 0.9};
    auto w = step(sys, {}, z);
    CHECK(w.x() == doctest::Approx(0.125 + 0.5 * (0.1 - 0.125)).epsilon(1e-15));
    CHECK(w.y() == doctest::Approx(0.5 + 0.5 * 0.4).epsilon(1e-15));
}

TEST_CASE("metric scale keeps phase box diameter at most 2") {
    for (auto sys : {SystemSpec::henon(1.4, 0.3), SystemSpec::identity(1),
                     SystemSpec::identity(2), SystemSpec::parablender_core(1, 1),
                     SystemSpec::planted_sinks(3)}) {
        double s = sys.metric_scale();
        CHECK(s * sys.phase_box().diameter() <= 2.0 + 1e-12);
        CHECK(s <= 1.0);
        CHECK(s > 0.0);
    }
}

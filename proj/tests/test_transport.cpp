#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "emlab/transport.hpp"
#include "oracles.hpp"

using namespace emlab;

namespace {

DiscreteMeasure make(int dim, std::vector<std::array<double, 2>> atoms,
                     std::vector<double> weights) {
    DiscreteMeasure mu;
    mu.dim = dim;
    mu.atoms = std::move(atoms);
    mu.weights = std::move(weights);
    return mu;
}

// random measure with weights that are multiples of 1/T (exact oracle territory)
DiscreteMeasure random_rational(Rng& rng, int dim, int max_atoms, int T, double span = 1.0) {
    int n = 1 + int(rng.next_below(max_atoms));
    std::vector<int> shares(n, 1);
    for (int r = n; r < T; ++r) shares[rng.next_below(n)] += 1;
    DiscreteMeasure mu;
    mu.dim = dim;
    for (int i = 0; i < n; ++i) {
        std::array<double, 2> p{0.0, 0.0};
        for (int c = 0; c < dim; ++c) p[c] = rng.uniform(0.0, span);
        mu.atoms.push_back(p);
        mu.weights.push_back(double(shares[i]) / T);
    }
    return mu;
}

DiscreteMeasure random_real(Rng& rng, int dim, int max_atoms, double span = 1.0) {
    int n = 1 + int(rng.next_below(max_atoms));
    DiscreteMeasure mu;
    mu.dim = dim;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        std::array<double, 2> p{0.0, 0.0};
        for (int c = 0; c < dim; ++c) p[c] = rng.uniform(0.0, span);
        mu.atoms.push_back(p);
        double w = 0.05 + rng.next_double();
        mu.weights.push_back(w);
        total += w;
    }
    for (double& w : mu.weights) w /= total;
    // renormalize exactly enough for validate()
    double s = 0.0;
    for (double w : mu.weights) s += w;
    mu.weights.back() += 1.0 - s;
    return mu;
}

}  // namespace

TEST_CASE("two diracs cost their distance, capped") {
    GroundMetric metric;
    auto a = make(1, {{0.0, 0.0}}, {1.0});
    auto b = make(1, {{0.7, 0.0}}, {1.0});
    CHECK(w1(a, b, metric) == doctest::Approx(0.7).epsilon(1e-14));
    auto far = make(1, {{5.0, 0.0}}, {1.0});
    CHECK(w1(a, far, metric) == doctest::Approx(2.0).epsilon(1e-14));  // truncation cap
}

TEST_CASE("splitting mass to the midpoint") {
    GroundMetric metric;
    auto a = make(1, {{0.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5});
    auto b = make(1, {{0.5, 0.0}}, {1.0});
    CHECK(w1(a, b, metric) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(oracles::w1_equal_split(a, b, metric, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("w1 is zero exactly on equal atom sets") {
    GroundMetric metric;
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto mu = random_real(rng, 2, 8);
        CHECK(w1(mu, mu, metric) == 0.0);
        auto nu = mu;
        nu.atoms[0][0] += 1e-3;
        CHECK(w1(mu, nu, metric) > 0.0);
    }
}

TEST_CASE("network simplex equals the assignment oracle on small measures") {
    GroundMetric metric;
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        int dim = 1 + int(rng.next_below(2));
        int T = 8 + 4 * int(rng.next_below(5));
        auto mu = random_rational(rng, dim, 6, T);
        auto nu = random_rational(rng, dim, 6, T);
        double fast = w1(mu, nu, metric);
        double slow = oracles::w1_equal_split(mu, nu, metric, T);
        CHECK(std::abs(fast - slow) < 1e-9);
    }
}

TEST_CASE("network simplex equals the 1D closed form") {
    GroundMetric metric;
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        auto mu = random_real(rng, 1, 40);
        auto nu = random_real(rng, 1, 40);
        double flow = w1(mu, nu, metric);
        double cdf = w1_line_closedform(mu, nu, metric);
        CHECK(std::abs(flow - cdf) < 1e-10);
    }
}

TEST_CASE("scaled metric agrees between solver and closed form") {
    GroundMetric metric;
    metric.scale = 0.25;
    Rng rng(18);
    for (int trial = 0; trial < 30; ++trial) {
        auto mu = random_real(rng, 1, 10, 4.0);
        auto nu = random_real(rng, 1, 10, 4.0);
        CHECK(std::abs(w1(mu, nu, metric) - w1_line_closedform(mu, nu, metric)) < 1e-10);
    }
}

TEST_CASE("metric axioms hold on random triples") {
    GroundMetric metric;
    Rng rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        int dim = 1 + int(rng.next_below(2));
        auto a = random_real(rng, dim, 8);
        auto b = random_real(rng, dim, 8);
        auto c = random_real(rng, dim, 8);
        double ab = w1(a, b, metric), ba = w1(b, a, metric);
        double ac = w1(a, c, metric), bc = w1(b, c, metric);
        CHECK(std::abs(ab - ba) <= 1e-10);
        CHECK(ab >= 0.0);
        CHECK(ac + bc - ab >= -1e-10);  // triangle slack
    }
}

TEST_CASE("degenerate uniform instances terminate and vanish") {
    GroundMetric metric;
    // many equal weights and repeated coordinates force degenerate pivots
    std::vector<std::array<double, 2>> atoms;
    std::vector<double> weights;
    for (int i = 0; i < 50; ++i) {
        atoms.push_back({double(i % 10) / 10.0, double(i / 10) / 5.0});
        weights.push_back(1.0 / 50.0);
    }
    auto mu = make(2, atoms, weights);
    CHECK(w1(mu, mu, metric) == 0.0);
    auto nu = mu;
    for (auto& p : nu.atoms) p[0] += 0.05;
    double d = w1(mu, nu, metric);
    CHECK(d == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("solver is deterministic") {
    GroundMetric metric;
    Rng rng(5);
    auto mu = random_real(rng, 2, 30);
    auto nu = random_real(rng, 2, 30);
    double a = w1(mu, nu, metric);
    double b = w1(mu, nu, metric);
    CHECK(a == b);
}

TEST_CASE("measure validation rejects bad input") {
    GroundMetric metric;
    auto ok = make(1, {{0.0, 0.0}}, {1.0});
    auto bad_sum = make(1, {{0.0, 0.0}}, {0.5});
    CHECK_THROWS_AS(w1(ok, bad_sum, metric), UsageError);
    auto neg = make(1, {{0.0, 0.0}, {1.0, 0.0}}, {1.5, -0.5});
    CHECK_THROWS_AS(w1(ok, neg, metric), UsageError);
    auto dim_mismatch = make(2, {{0.0, 0.0}}, {1.0});
    CHECK_THROWS_AS(w1(ok, dim_mismatch, metric), UsageError);
    auto nonfinite = make(1, {{std::nan(""), 0.0}}, {1.0});
    CHECK_THROWS_AS(w1(ok, nonfinite, metric), UsageError);
}

TEST_CASE("empirical measures merge repeated points exactly") {
    auto sys = SystemSpec::rotation(0.25, 1);
    PhasePoint z;
    z.c = {0.0, 0.0};
    auto traj = orbit(sys, {}, z, 5);  // 0, .25, .5, .75, 0
    auto mu = empirical_from_trajectory(traj, 1);
    REQUIRE(mu.size() == 4);
    CHECK(mu.weights[0] == doctest::Approx(0.4));  // 0 visited twice
    CHECK(mu.weights[1] == doctest::Approx(0.2));
    double total = 0.0;
    for (double w : mu.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("empirical measure construction reports escapes") {
    auto sys = SystemSpec::henon(1.4, 0.3);
    PhasePoint z;
    z.c = {3.9, 0.0};
    auto traj = orbit(sys, {}, z, 10);
    REQUIRE(traj.escaped());
    try {
        empirical_from_trajectory(traj, 2);
        CHECK(false);
    } catch (const EscapeError& e) {
        CHECK(e.escape_time == traj.escape_time);
    }
}

TEST_CASE("quantize bounds, idempotence, alignment") {
    GroundMetric metric;
    Rng rng(55);
    for (double cell : {0.1, 0.037}) {
        for (int dim : {1, 2}) {
            auto mu = random_real(rng, dim, 30);
            auto q = quantize(mu, cell);
            CHECK(w1(mu, q, metric) <= cell * std::sqrt(double(dim)) / 2.0 + 1e-12);
            auto qq = quantize(q, cell);
            REQUIRE(qq.size() == q.size());
            for (int i = 0; i < q.size(); ++i) {
                CHECK(qq.atoms[i] == q.atoms[i]);
                CHECK(qq.weights[i] == q.weights[i]);
            }
        }
    }
    auto single = make(2, {{0.23, 0.41}}, {1.0});
    auto qs = quantize(single, 0.1);
    REQUIRE(qs.size() == 1);
    CHECK(qs.atoms[0][0] == doctest::Approx(0.25));
    CHECK(qs.atoms[0][1] == doctest::Approx(0.45));
    CHECK(qs.weights[0] == 1.0);
}

TEST_CASE("doubling-orbit continuity at a tiny base point") {
    // Perturbing the start by eta <= 1e-9 moves the empirical measure by at
    // most sum_k 2^k eta / n; with x0 = 2^-60 and eta = 2^-70 the bound
    // 2^50 eta / 50 stays below 1e-4 with room to spare.
    auto sys = SystemSpec::doubling();
    GroundMetric metric;
    double x0 = std::ldexp(1.0, -60), eta = std::ldexp(1.0, -70);
    PhasePoint z1, z2;
    z1.c = {x0, 0.0};
    z2.c = {x0 + eta, 0.0};
    auto m1 = empirical_from_trajectory(orbit(sys, {}, z1, 50), 1);
    auto m2 = empirical_from_trajectory(orbit(sys, {}, z2, 50), 1);
    double d = w1(m1, m2, metric);
    CHECK(d <= 1e-4);
    CHECK(d > 0.0);
}

TEST_CASE("line closed form demands 1D input") {
    GroundMetric metric;
    auto a = make(2, {{0.0, 0.0}}, {1.0});
    CHECK_THROWS_AS(w1_line_closedform(a, a, metric), UsageError);
}

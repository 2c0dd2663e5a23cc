#include <cmath>
#include <random>

#include "doctest.h"
#include "skewfd/dynamics.hpp"
#include "skewfd/stencil.hpp"

using namespace skewfd;

static ConservativeSystem advection1d(int n, double h) {
    ConservativeSystem sys;
    sys.lat = Lattice::line1d(n, h);
    sys.K = to_tensor(preset_central(h), sys.lat);
    sys.scale = 1.0 / (2 * h);
    sys.integrals.push_back(quadratic_half_sum(1.0, "half-sum-sq"));
    return sys;
}

static std::vector<double> mean_zero_field(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> q((size_t)n * n);
    double mean = 0;
    for (auto& v : q) mean += (v = dist(rng));
    mean /= (double)q.size();
    for (auto& v : q) v -= mean;
    return q;
}

TEST_CASE("rhs matches the hand-expanded central bracket") {
    auto sys = advection1d(8, 0.5);
    std::vector<double> u{0.3, -1.2, 0.7, 0.1, -0.4, 0.9, -0.6, 0.2};
    auto F = rhs(sys, u);
    for (int i = 0; i < 8; ++i) {
        double expect = (u[(i + 1) % 8] - u[(i + 7) % 8]) / (2 * 0.5);
        CHECK(F[i] == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("integral factories and gradient self-check") {
    auto sys = advection1d(8, 1.0);
    sys.integrals.push_back(cubic_third_sum(2.0));
    sys.integrals.push_back(linear_sum(0.5));
    std::vector<double> u{0.3, -1.2, 0.7, 0.1, -0.4, 0.9, -0.6, 0.2};
    CHECK_NOTHROW(gradient_self_check(sys, u));
    sys.integrals[0].grad = [](const std::vector<double>& w) {
        return std::vector<double>(w.size(), 42.0);
    };
    CHECK_THROWS(gradient_self_check(sys, u));
}

TEST_CASE("pointwise skew form") {
    std::vector<double> u{1.0, 2.0};
    std::vector<double> f{-u[1], u[0]};
    auto J = skew_form_from_field(f, u);
    CHECK(J[0][0] == doctest::Approx(0.0));
    CHECK(J[1][1] == doctest::Approx(0.0));
    CHECK(J[0][1] == doctest::Approx(-1.0));
    CHECK(J[1][0] == doctest::Approx(1.0));
    // J gradH reproduces f whenever f is orthogonal to gradH
    for (int a = 0; a < 2; ++a)
        CHECK(J[a][0] * u[0] + J[a][1] * u[1] == doctest::Approx(f[a]).epsilon(1e-14));
    CHECK_THROWS(skew_form_from_field(f, {0.0, 0.0}));
}

TEST_CASE("midpoint step: identity at dt = 0, exact quadratic conservation, reversibility") {
    auto sys = euler2d_system(6, 0.8);
    auto q = mean_zero_field(6, 3);
    CHECK(step_midpoint(sys, q, 0.0) == q);

    double dt = 0.05;
    auto q1 = step_midpoint(sys, q, dt);
    for (const auto& I : sys.integrals)
        CHECK(std::abs(I.eval(q1) - I.eval(q)) <= 1e-11 * std::max(1.0, std::abs(I.eval(q))));

    auto back = step_midpoint(sys, q1, -dt);
    for (size_t i = 0; i < q.size(); ++i) CHECK(back[i] == doctest::Approx(q[i]).epsilon(1e-9));
}

TEST_CASE("poisson solve inverts the five-point laplacian") {
    int n = 8;
    double h = 0.4;
    auto q = mean_zero_field(n, 5);
    auto psi = poisson_solve(q, n, h);
    auto idx = [n](int i, int j) { return (size_t)(((i % n) + n) % n) * n + ((j % n) + n) % n; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double lap = (4 * psi[idx(i, j)] - psi[idx(i + 1, j)] - psi[idx(i - 1, j)] -
                          psi[idx(i, j + 1)] - psi[idx(i, j - 1)]) /
                         (h * h);
            CHECK(lap == doctest::Approx(q[idx(i, j)]).epsilon(1e-9));
        }
    double mean = 0;
    for (double v : psi) mean += v;
    CHECK(std::abs(mean) <= 1e-10);
}

TEST_CASE("vorticity rhs agrees with the classical nine-point bracket") {
    int n = 8;
    double h = 0.7;
    auto sys = euler2d_system(n, h);
    auto q = mean_zero_field(n, 9);
    auto F = rhs(sys, q);
    auto psi = poisson_solve(q, n, h);
    auto ref = arakawa_reference(psi, q, n, h);
    for (size_t i = 0; i < q.size(); ++i)
        CHECK(F[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("single-mode vorticity is a steady state") {
    int n = 16;
    double h = 2 * 3.141592653589793 / n;
    std::vector<double> q((size_t)n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q[(size_t)i * n + j] = std::sin(i * h) * std::cos(j * h);
    auto sys = euler2d_system(n, h);
    auto F = rhs(sys, q);
    for (double f : F) CHECK(std::abs(f) <= 1e-10);
}

TEST_CASE("trajectory: midpoint preserves both integrals, rk4 drifts") {
    int n = 8;
    double h = 0.8, dt = 0.08;
    auto sys = euler2d_system(n, h);
    auto q = mean_zero_field(n, 13);
    auto mid = integrate(sys, q, dt, 25, Method::midpoint, 5);
    auto rk = integrate(sys, q, dt, 25, Method::rk4);
    REQUIRE(mid.times.size() == 26);
    CHECK(mid.snapshots.size() == 6);
    CHECK(rk.snapshots.size() == 1);
    for (int j = 0; j < 2; ++j) {
        double ref = mid.integrals[0][j], drift_mid = 0, drift_rk = 0;
        for (size_t s = 0; s < mid.integrals.size(); ++s) {
            drift_mid = std::max(drift_mid, std::abs(mid.integrals[s][j] - ref));
            drift_rk = std::max(drift_rk, std::abs(rk.integrals[s][j] - ref));
        }
        CHECK(drift_mid <= 1e-11 * std::max(1.0, std::abs(ref)));
        CHECK(drift_rk >= 10 * drift_mid);
    }
    CHECK_THROWS(integrate(sys, std::vector<double>(q.size(), 1.0), dt, 1, Method::midpoint));
    CHECK_THROWS([] { (void)method_from_name("euler"); }());
    CHECK(method_from_name("rk4") == Method::rk4);
}

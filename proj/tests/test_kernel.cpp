#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wke/kernel.hpp"
#include "wke/quadrature.hpp"

using namespace wke;

// Reference values computed once with 50-digit arithmetic and frozen here.
namespace oracle {
constexpr double r_half = -2.83067125275192865063;
constexpr double s_half = 4.26679163380547795924;
constexpr double v_half = 1.43612038105354930861;
constexpr double r_two = -0.353833906593991081328;
constexpr double s_two = 0.533348954225684744905;
constexpr double v_two = 0.179515047631693663577;
constexpr double k_norm1 = 11.0660656775258950243;          // ||K||_{L1}
constexpr double k_norm1_weighted = 9.42113161067766858787;  // ||K||_{L1(e^{x/2})}
constexpr double conv_15 = 2.060289487e-13;
constexpr double conv_20 = 1.574590494e-18;
constexpr double conv_30 = 6.383124223e-29;
constexpr double conv_m15 = 0.001217738647;
}  // namespace oracle

TEST_CASE("closed forms match the frozen high-precision references") {
    CHECK(eval_R(0.5) == doctest::Approx(oracle::r_half).epsilon(1e-14));
    CHECK(eval_S(0.5) == doctest::Approx(oracle::s_half).epsilon(1e-14));
    CHECK(eval_V(0.5) == doctest::Approx(oracle::v_half).epsilon(1e-14));
    CHECK(eval_R(2.0) == doctest::Approx(oracle::r_two).epsilon(1e-14));
    CHECK(eval_S(2.0) == doctest::Approx(oracle::s_two).epsilon(1e-14));
    CHECK(eval_V(2.0) == doctest::Approx(oracle::v_two).epsilon(1e-14));
}

TEST_CASE("inversion symmetry V(1/p) = p^3 V(p)") {
    for (double p : {0.1, 0.3, 0.5, 0.9, 0.99}) {
        CHECK(eval_V(1.0 / p) == doctest::Approx(cube(p) * eval_V(p)).epsilon(1e-12));
    }
    for (double x : {0.5, 1.0, 3.0, 10.0, 25.0}) {
        // K(-x) = e^{3x/2} K(x)
        CHECK(eval_K(-x) == doctest::Approx(std::exp(1.5 * x) * eval_K(x)).epsilon(1e-12));
    }
}

TEST_CASE("preconditions throw") {
    CHECK_THROWS_AS(eval_R(0.0), precondition_error);
    CHECK_THROWS_AS(eval_S(-1.0), precondition_error);
    CHECK_THROWS_AS(eval_R(1.0), precondition_error);
    CHECK_THROWS_AS(eval_K(0.0), precondition_error);
    CHECK_THROWS_AS(eval_Kprime(0.0), precondition_error);
    CHECK_THROWS_AS(eval_Vprime(1.0), precondition_error);
}

TEST_CASE("asymptotic ratios approach 1 monotonically") {
    // p -> 0: V ~ -4 p^2 (log p - 2/3); p -> inf: V ~ +4 p^{-5} (log p + 2/3).
    // Monotone decrease of the deviation up to the double round-off floor.
    double prev_small = 1e9, prev_large = 1e9;
    for (double p : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double dev =
            std::abs(eval_V(p) / (-4.0 * p * p * (std::log(p) - 2.0 / 3.0)) - 1.0);
        CHECK(dev < prev_small + 1e-15);
        prev_small = dev;
    }
    CHECK(prev_small < 1e-9);
    for (double p : {1e1, 1e2, 1e3, 1e4}) {
        const double dev =
            std::abs(eval_V(p) / (4.0 * std::pow(p, -5.0) * (std::log(p) + 2.0 / 3.0)) - 1.0);
        CHECK(dev < prev_large + 1e-15);
        prev_large = dev;
    }
    CHECK(prev_large < 1e-9);
}

TEST_CASE("singular expansion matches the closed form across the window edge") {
    // Relative mismatch at |p-1| = 1e-4 stays below 1e-4 (continuity of the
    // piecewise evaluator at the exclusion boundary).
    for (double sign : {1.0, -1.0}) {
        const double p = 1.0 + sign * default_exclusion_p;
        const double closed = eval_R(p) + eval_S(p);
        const double expanded = eval_V_expansion(p);
        CHECK(rel_diff(closed, expanded) < 1e-4);
    }
    for (double sign : {1.0, -1.0}) {
        const double x = sign * default_exclusion_x;
        CHECK(rel_diff(eval_V(std::exp(0.5 * x), 0.0), eval_K_expansion(x)) < 1e-4);
    }
}

TEST_CASE("positivity on a dense sample") {
    for (int i = 0; i <= 2000; ++i) {
        const double x = -30.0 + 60.0 * i / 2000.0;
        if (std::abs(x) < 1e-9) continue;
        CHECK(eval_K(x) > 0.0);
    }
    for (int i = 1; i <= 1000; ++i) {
        const double p = 1e-3 * std::pow(1e6, i / 1000.0);  // 1e-3 .. 1e3
        if (std::abs(p - 1.0) < 1e-6) continue;
        CHECK(eval_V(p) > 0.0);
    }
}

TEST_CASE("closed-form derivative agrees with central differences") {
    for (double p : {0.05, 0.3, 0.7, 0.95, 1.05, 1.5, 3.0, 10.0}) {
        const double h = 1e-6 * std::max(1.0, p);
        const double fd = (eval_V(p + h, 0.0) - eval_V(p - h, 0.0)) / (2.0 * h);
        CHECK(eval_Vprime(p) == doctest::Approx(fd).epsilon(1e-6));
    }
    for (double x : {-5.0, -1.0, 1.0, 5.0}) {
        const double h = 1e-6;
        const double fd = (eval_K(x + h) - eval_K(x - h)) / (2.0 * h);
        CHECK(eval_Kprime(x) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("derivative expansion matches the closed form near the singularity") {
    for (double sign : {1.0, -1.0}) {
        const double x = sign * default_exclusion_x;
        const double p = std::exp(0.5 * x);
        CHECK(rel_diff(0.5 * p * eval_Vprime(p), eval_Kprime_expansion(x)) < 2e-4);
    }
}

TEST_CASE("L1 norms match the frozen references and the Mellin identities") {
    CHECK(k_norm(1.0) == doctest::Approx(oracle::k_norm1).epsilon(1e-9));
    CHECK(k_norm(1.0, k_weight::exp_half_x) ==
          doctest::Approx(oracle::k_norm1_weighted).epsilon(1e-9));
    // Truncation stability: doubling the radius moves the norm by < 1e-8.
    CHECK(std::abs(k_norm(1.0, k_weight::none, 120.0) - k_norm(1.0)) < 1e-8);
    // L^q for q in [1, 2) is finite and grows toward the q = 2 divergence.
    const double n1 = k_norm(1.0), n15 = k_norm(1.5), n19 = k_norm(1.9);
    CHECK(n15 > 0.0);
    CHECK(n19 > n15 * 0.0);  // finite
    CHECK(std::pow(n19, 1.9) > std::pow(n15, 1.5));
    CHECK(n1 > 0.0);
    CHECK_THROWS_AS(k_norm(2.0), precondition_error);
    CHECK_THROWS_AS(k_norm(2.5), precondition_error);
    CHECK_THROWS_AS(k_norm(0.5), precondition_error);
}

TEST_CASE("convolution matches the frozen references") {
    CHECK(conv_KK(15.0) == doctest::Approx(oracle::conv_15).epsilon(1e-8));
    CHECK(conv_KK(20.0) == doctest::Approx(oracle::conv_20).epsilon(1e-8));
    CHECK(conv_KK(30.0) == doctest::Approx(oracle::conv_30).epsilon(1e-8));
    CHECK(conv_KK(-15.0) == doctest::Approx(oracle::conv_m15).epsilon(1e-8));
    // Parity (K*K)(-x) = e^{3x/2} (K*K)(x).
    CHECK(conv_KK(-15.0) ==
          doctest::Approx(std::exp(1.5 * 15.0) * conv_KK(15.0)).epsilon(1e-8));
}

TEST_CASE("convolution cross-check against a direct double integral at x = 0.5") {
    // Independent route: integrate K(x - y) K(y) with a different panel
    // decomposition (substitutions u^2 around both singular points, outer
    // panels split at +/- 2 instead of the production collar logic).
    const double x = 0.5;
    auto f = [&](double y) { return eval_K(x - y) * eval_K(y); };
    auto collar = [&](double c, double sign, double w) {
        auto g = [&](double u) { return f(c + sign * u * u) * 2.0 * u; };
        return integrate(g, 0.0, std::sqrt(w));
    };
    double alt = collar(0.0, -1.0, 0.2) + collar(0.0, 1.0, 0.2) +
                 collar(x, -1.0, 0.1) + collar(x, 1.0, 0.1);
    alt += integrate(f, 0.2, x - 0.1);
    alt += integrate_panels(f, {-60.0, -10.0, -2.0, -0.2});
    alt += integrate_panels(f, {x + 0.1, 2.0, 10.0, 60.0});
    CHECK(conv_KK(0.5) == doctest::Approx(alt).epsilon(1e-9));
}

TEST_CASE("convolution diverges at x = 0") {
    CHECK_THROWS_AS(conv_KK(0.0), numeric_error);
}

TEST_CASE("cell integrals split and converge") {
    // A cell pair touching x = 0 reproduces the adaptive integral over the
    // union computed through the u^2 substitution at a different width.
    const double a = -0.01, b = 0.02;
    const double split = cell_integral_K(a, 0.0) + cell_integral_K(0.0, b);
    CHECK(cell_integral_K(a, b) == doctest::Approx(split).epsilon(1e-12));
    // Tilted cell integral equals the plain integral of K e^{tilt x}.
    auto g = [](double x) { return eval_K(x) * std::exp(0.5 * x); };
    CHECK(cell_integral_K(1.0, 1.5, 0.5) ==
          doctest::Approx(integrate(g, 1.0, 1.5)).epsilon(1e-12));
    CHECK_THROWS_AS(cell_integral_K(1.0, 1.0), precondition_error);
}

TEST_CASE("kernel table invariants") {
    const KernelTable t = KernelTable::build(40.0, 1u << 12);
    REQUIRE(t.x_grid.size() == (1u << 12));
    // Half-cell offset: no node at x = 0, symmetric node layout.
    for (double x : t.x_grid) CHECK(std::abs(x) > 1e-6);
    const std::size_t n = t.x_grid.size();
    for (std::size_t j = 0; j < n; ++j)
        CHECK(t.x_grid[j] == doctest::Approx(-t.x_grid[n - 1 - j]).epsilon(1e-12));
    // Samples match direct evaluation and stay below the envelope far out.
    for (std::size_t j = 0; j < n; j += 97)
        CHECK(t.k_values[j] == doctest::Approx(eval_K(t.x_grid[j])).epsilon(1e-14));
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(t.x_grid[j]) > 5.0)
            CHECK(std::abs(t.k_values[j]) <= tail_envelope(t.x_grid[j]));
    CHECK_THROWS_AS(KernelTable::build(-1.0, 16), precondition_error);
}

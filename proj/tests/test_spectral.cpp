#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "wke/spectral.hpp"

using namespace wke;

// Reference values computed once with 50-digit arithmetic and frozen here.
namespace oracle {
constexpr double wv_0 = 5.53303283876294751217;
constexpr double wv_half = 4.974108141955387749;
constexpr double wv_1 = 4.71056580533883429394;
constexpr double wv_3half = 4.63196001665030785341;
constexpr double gamma = -9.42113161067766858787;
constexpr double omega_3i4 = -0.157211577377052881051;
constexpr double omega_0 = 1.64493406684822643647;  // pi^2/6
constexpr double omega_i4 = 0.527084673233106910126;
constexpr double wsecond_3half = 0.612253624253;
}  // namespace oracle

static const SpectralContext& ctx() {
    static const SpectralContext c = calibrate_gamma();
    return c;
}

TEST_CASE("Mellin values match the frozen references") {
    CHECK(mellin_WV({0.0, 0.0}).real() == doctest::Approx(oracle::wv_0).epsilon(1e-11));
    CHECK(mellin_WV({0.5, 0.0}).real() == doctest::Approx(oracle::wv_half).epsilon(1e-11));
    CHECK(mellin_WV({1.0, 0.0}).real() == doctest::Approx(oracle::wv_1).epsilon(1e-11));
    CHECK(mellin_WV({1.5, 0.0}).real() == doctest::Approx(oracle::wv_3half).epsilon(1e-11));
    CHECK(mellin_WV({0.0, 0.0}).imag() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("reflection symmetry W_V(s) = W_V(3 - s)") {
    for (double s : {0.0, 0.5, 1.0, 1.25}) {
        CHECK(mellin_WV({s, 0.0}).real() ==
              doctest::Approx(mellin_WV({3.0 - s, 0.0}).real()).epsilon(1e-11));
    }
    // Off the real axis: W_V(s) = W_V(3 - conj(s)) conjugated.
    const complex_t a = mellin_WV({0.7, 0.9});
    const complex_t b = mellin_WV({2.3, 0.9});
    CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-10));
    CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-10));
}

TEST_CASE("strip preconditions") {
    CHECK_THROWS_AS(mellin_WV({-2.0, 0.0}), precondition_error);
    CHECK_THROWS_AS(mellin_WV({5.0, 0.0}), precondition_error);
    CHECK_THROWS_AS(mellin_WV({7.0, 0.0}), precondition_error);
    CHECK_THROWS_AS(fourier_K({0.0, -1.0}), precondition_error);
    CHECK_THROWS_AS(fourier_K({0.0, 2.5}), precondition_error);
    CHECK_THROWS_AS(fourier_K({0.0, 3.0}), precondition_error);
}

TEST_CASE("calibration") {
    CHECK(ctx().gamma == doctest::Approx(oracle::gamma).epsilon(1e-11));
    CHECK(ctx().gamma_N == doctest::Approx(0.5 * oracle::gamma).epsilon(1e-11));
    CHECK(ctx().gamma_consistency < 1e-10);
    CHECK(std::abs(ctx().W({1.0, 0.0})) < 1e-9);
    CHECK(std::abs(ctx().W({2.0, 0.0})) < 1e-9);
}

TEST_CASE("double poles at the strip edges") {
    // (s + 2)^2 W_V(s) -> 4 as s -> -2 with linear coefficient 8/3:
    // W_V(s) = 4/(s+2)^2 + (8/3)/(s+2) + C + O(d), C ~ 3.27, mirrored at
    // s = 5.  The form d^2 w - 4 - (8/3) d isolates the O(d^2) remainder.
    for (double d : {0.1, 0.05, 0.02, 0.001}) {
        const double w = mellin_WV({-2.0 + d, 0.0}).real();
        CHECK(std::abs(d * d * w - 4.0 - (8.0 / 3.0) * d) < 4.0 * d * d);
        // Linear coefficient converges to 8/3.
        CHECK(std::abs((d * d * w - 4.0) / d - 8.0 / 3.0) < 4.0 * d);
        const double w5 = mellin_WV({5.0 - d, 0.0}).real();
        CHECK(std::abs(d * d * w5 - 4.0 - (8.0 / 3.0) * d) < 4.0 * d * d);
    }
}

TEST_CASE("Mellin-Fourier identity on the strip") {
    for (double re : {-7.0, -1.0, 0.0, 0.5, 4.0}) {
        for (double im : {-0.4, 0.0, 0.75, 2.0}) {
            const complex_t xi(re, im);
            const complex_t kh = fourier_K(xi);
            const complex_t wv2 = 2.0 * mellin_WV(complex_t(0.0, -2.0) * xi);
            CHECK(std::abs(kh - wv2) / (1.0 + std::abs(kh)) < 1e-8);
        }
    }
}

TEST_CASE("conjugate symmetry and realness of Omega on the critical lines") {
    // K^(-conj(xi)) = conj(K^(xi)).
    for (double re : {0.5, 3.0}) {
        const complex_t a = fourier_K({re, 0.6});
        const complex_t b = fourier_K({-re, 0.6});
        CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-10));
        CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-10));
    }
    // Omega(u + 3i/4) is real for all real u (reflection line of W).
    for (double u : {0.0, 0.5, 1.0, 2.0, 5.0, 20.0, 70.0}) {
        const complex_t om = ctx().omega({u, 0.75});
        CHECK(std::abs(om.imag()) < 1e-8 * (1.0 + std::abs(om.real())));
    }
}

TEST_CASE("Omega reference values") {
    CHECK(ctx().omega({0.0, 0.75}).real() == doctest::Approx(oracle::omega_3i4).epsilon(1e-9));
    CHECK(ctx().omega({0.0, 0.0}).real() == doctest::Approx(oracle::omega_0).epsilon(1e-9));
    CHECK(ctx().omega({0.0, 1.5}).real() == doctest::Approx(oracle::omega_0).epsilon(1e-9));
    CHECK(ctx().omega({0.0, 0.25}).real() == doctest::Approx(oracle::omega_i4).epsilon(1e-9));
    // Mellin route agrees.
    CHECK(ctx().omega_mellin({0.0, 0.75}).real() ==
          doctest::Approx(oracle::omega_3i4).epsilon(1e-9));
}

TEST_CASE("monotone decay of Re Omega along horizontal lines") {
    // On the lines Im xi = rho in (0, 3/2), Re Omega decreases in |Re xi|
    // (checked on a coarse monotone ladder).
    for (double rho : {0.5, 1.0, 0.75}) {
        double prev = 1e9;
        for (double u : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            const double v = ctx().omega({u, rho}).real();
            CHECK(v < prev);
            prev = v;
        }
        CHECK(prev < 0.0);  // eventually negative
    }
}

TEST_CASE("fourier asymptote at large real xi") {
    // Leading order is real (even singular part of K); the odd part
    // contributes i (3 pi sqrt(2 pi) / 8) |xi|^{-3/2}.
    const double target = pi * std::sqrt(2.0 * pi);
    const double odd_amp = 3.0 * pi * std::sqrt(2.0 * pi) / 8.0;
    for (double u : {300.0, 1000.0, 5000.0}) {
        const complex_t kh = fourier_K({u, 0.0});
        CHECK(std::abs(kh) * std::sqrt(u) == doctest::Approx(target).epsilon(0.05));
        CHECK(std::abs(kh.imag()) < 0.01 * kh.real());
        CHECK(kh.imag() * std::pow(u, 1.5) == doctest::Approx(odd_amp).epsilon(0.01));
        // Conjugate line: sign of the odd part flips.
        CHECK(fourier_K({-u, 0.0}).imag() == doctest::Approx(-kh.imag()).epsilon(1e-6));
    }
}

TEST_CASE("derivatives of W") {
    bool warn = false;
    const complex_t wp = w_derivative(ctx(), {1.5, 0.0}, 1, &warn);
    CHECK(std::abs(wp) < 1e-9);
    CHECK_FALSE(warn);
    const complex_t wpp = w_derivative(ctx(), {1.5, 0.0}, 2);
    CHECK(wpp.real() == doctest::Approx(oracle::wsecond_3half).epsilon(1e-6));
    CHECK(wpp.real() > 0.0);
    // Interior finite-difference consistency: W'( s ) against a secant.
    const double h = 1e-4;
    const complex_t secant = (ctx().W({1.0 + h, 0.0}) - ctx().W({1.0 - h, 0.0})) / (2.0 * h);
    CHECK(w_derivative(ctx(), {1.0, 0.0}, 1).real() ==
          doctest::Approx(secant.real()).epsilon(1e-6));
    CHECK_THROWS_AS(w_derivative(ctx(), {-1.999, 0.0}, 1), precondition_error);
    CHECK_THROWS_AS(w_derivative(ctx(), {1.5, 0.0}, 3), precondition_error);
    bool edge_warn = false;
    w_derivative(ctx(), {-1.995, 0.0}, 1, &edge_warn);
    CHECK(edge_warn);
}

TEST_CASE("saddle point solves W'(s) = ratio") {
    // ratio 0 lands on the symmetry point 3/2.
    CHECK(saddle_find(ctx(), 0.0) == doctest::Approx(1.5).epsilon(1e-6));
    // Large negative ratios approach s = -2 like -2 + (-8/ratio)^{1/3}.
    for (double ratio : {-100.0, -1000.0}) {
        const double s = saddle_find(ctx(), ratio);
        const double wp = w_derivative(ctx(), {s, 0.0}, 1).real();
        CHECK(wp == doctest::Approx(ratio).epsilon(1e-5));
        CHECK(s + 2.0 == doctest::Approx(std::cbrt(-8.0 / ratio)).epsilon(0.2));
    }
    for (double ratio : {100.0, 1000.0}) {
        const double s = saddle_find(ctx(), ratio);
        CHECK(w_derivative(ctx(), {s, 0.0}, 1).real() == doctest::Approx(ratio).epsilon(1e-5));
        CHECK(5.0 - s == doctest::Approx(std::cbrt(8.0 / ratio)).epsilon(0.2));
    }
    CHECK_THROWS_AS(saddle_find(ctx(), -1e12), numeric_error);
}

TEST_CASE("semigroup kernel H(t)") {
    static const HKernelPlan plan;
    // ||H(t)||_1 <= ||K||_1 (e^{||K||_1 t} - 1) at several times.
    const double k1 = k_norm(1.0);
    for (double t : {0.1, 1.0, 3.0}) {
        const std::vector<double> h = plan.values(t);
        double n1 = 0.0;
        for (double v : h) n1 += std::abs(v);
        n1 *= plan.dx;
        CHECK(n1 <= k1 * (std::exp(k1 * t) - 1.0));
        CHECK(n1 > 0.0);
    }

    // Short-time expansion: the remainder H(t) - t K - t^2 (K*K)/2 is O(t^3)
    // in L-infinity away from the singular point.  Check both the absolute
    // size and the cubic scaling between two small times.
    std::vector<double> xs;
    for (double x = -20.0; x <= 20.0; x += 0.37) xs.push_back(x);
    auto worst_residual = [&](double t) {
        const std::vector<double> h = plan.sample(t, xs);
        double worst = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::abs(xs[i]) < 1.0) continue;  // skip the singular cell
            const double model = t * eval_K(xs[i]) + 0.5 * t * t * conv_KK(xs[i]);
            worst = std::max(worst, std::abs(h[i] - model));
        }
        return worst;
    };
    const double r1 = worst_residual(0.02);
    const double r2 = worst_residual(0.04);
    CHECK(r1 < 1e-3);
    CHECK(r2 / r1 == doctest::Approx(8.0).epsilon(0.25));  // ~t^3

    // Interpolation window guard.
    CHECK_THROWS_AS(plan.sample(1.0, {1e9}), precondition_error);
    CHECK_THROWS_AS(plan.values(0.0), precondition_error);
    CHECK_THROWS_AS(HKernelPlan(1000), precondition_error);
}

TEST_CASE("H(t) stability under plan refinement") {
    // Halving the sample count doubles the xi spacing (halving the
    // periodization window); agreement on moderate x shows both windowing
    // and the |xi|^{-1/2} spectral tail are under control.
    static const HKernelPlan fine;           // 2^18 samples
    static const HKernelPlan coarse(1u << 17);  // half the xi range
    std::vector<double> xs;
    for (double x = -10.0; x <= 10.0; x += 0.61) xs.push_back(x);
    const std::vector<double> hf = fine.sample(1.0, xs);
    const std::vector<double> hc = coarse.sample(1.0, xs);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(std::abs(hf[i] - hc[i]) < 1e-4);
}

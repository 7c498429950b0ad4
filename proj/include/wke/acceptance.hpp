#pragma once

// The acceptance suite: one function per criterion, each returning a
// pass/fail verdict together with the measured quantities.  Tolerances are
// pinned in code next to each check.  Failures are data, not exceptions: a
// criterion whose target value disagrees with what the implemented closed
// forms actually produce is reported as FAIL with diagnostic comparisons
// against the corrected form alongside.

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wke/common.hpp"
#include "wke/condensation.hpp"
#include "wke/io.hpp"
#include "wke/kernel.hpp"
#include "wke/linear.hpp"
#include "wke/spectral.hpp"

namespace wke {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    std::vector<std::pair<std::string, double>> metrics;
    std::string detail;

    std::string summary_line() const {
        char head[160];
        std::snprintf(head, sizeof(head), "[%s] %2d %-34s measured=%.6g target=%.6g tol=%.2g",
                      pass ? "PASS" : "FAIL", index, name.c_str(), measured, target, tolerance);
        std::string s = head;
        if (!detail.empty()) s += "  | " + detail;
        return s;
    }
};

namespace acceptance {

inline constexpr double pi_over_sqrt2 = 2.22144146907918312351;

// 1. Kernel singularity: V(p) sqrt|p-1| -> pi/sqrt2, within 1e-3 at
//    |p-1| = 1e-6 (expansion path) and 1e-2 at |p-1| = 1e-3 (closed form).
inline CriterionResult criterion_1() {
    CriterionResult r{1, "kernel-singularity"};
    r.target = pi_over_sqrt2;
    double worst_expansion = 0.0, worst_closed = 0.0, worst_shifted = 0.0;
    for (double sign : {1.0, -1.0}) {
        const double p6 = 1.0 + sign * 1e-6;
        const double dev6 = std::abs(eval_V(p6) * std::sqrt(1e-6) / pi_over_sqrt2 - 1.0);
        worst_expansion = std::max(worst_expansion, dev6);
        const double p3 = 1.0 + sign * 1e-3;
        const double dev3 = std::abs(eval_V(p3) * std::sqrt(1e-3) / pi_over_sqrt2 - 1.0);
        worst_closed = std::max(worst_closed, dev3);
        // Diagnostic: the same limit after removing the constant term of the
        // local expansion, which otherwise contributes |c0| sqrt(h) and
        // dominates both deviations.
        const double shifted =
            std::abs((eval_V(p6) - kernel_c0) * std::sqrt(1e-6) / pi_over_sqrt2 - 1.0);
        worst_shifted = std::max(worst_shifted, shifted);
    }
    r.measured = worst_expansion;
    r.tolerance = 1e-3;
    r.pass = (worst_expansion <= 1e-3) && (worst_closed <= 1e-2);
    r.metrics = {{"deviation_expansion_h1e-6", worst_expansion},
                 {"deviation_closed_h1e-3", worst_closed},
                 {"deviation_constant_removed", worst_shifted}};
    r.detail =
        "ratio deviation is dominated by the constant term c0 sqrt(h) of the local "
        "expansion; with c0 removed the deviation is " +
        format_double(worst_shifted);
    return r;
}

// 2. Zeros of the multiplier after gamma calibration.
inline CriterionResult criterion_2(const SpectralContext& ctx) {
    CriterionResult r{2, "multiplier-zeros"};
    const double w1 = std::abs(ctx.W(complex_t(1.0, 0.0)));
    const double w2 = std::abs(ctx.W(complex_t(2.0, 0.0)));
    r.measured = w1;
    r.target = 0.0;
    r.tolerance = 1e-6;
    r.pass = (w1 <= 1e-6) && (ctx.gamma_consistency <= 1e-6 * std::abs(ctx.gamma));
    r.metrics = {{"abs_W1", w1},
                 {"abs_W2", w2},
                 {"consistency_residual", ctx.gamma_consistency},
                 {"gamma", ctx.gamma}};
    return r;
}

// 3. Omega(3i/4) = -0.1572 +- 1e-3, W'(3/2) = 0 +- 1e-6, W''(3/2) > 0.
inline CriterionResult criterion_3(const SpectralContext& ctx) {
    CriterionResult r{3, "omega-critical-value"};
    const double om = ctx.omega(complex_t(0.0, 0.75)).real();
    const double wp = w_derivative(ctx, complex_t(1.5, 0.0), 1).real();
    const double wpp = w_derivative(ctx, complex_t(1.5, 0.0), 2).real();
    r.measured = om;
    r.target = -0.1572;
    r.tolerance = 1e-3;
    r.pass = (std::abs(om + 0.1572) <= 1e-3) && (std::abs(wp) <= 1e-6) && (wpp > 0.0);
    r.metrics = {{"omega_3i4", om}, {"wprime_3half", wp}, {"wsecond_3half", wpp}};
    return r;
}

// 4. Mellin-Fourier identity over a 50-point strip sample.
inline CriterionResult criterion_4(const SpectralContext& ctx) {
    CriterionResult r{4, "mellin-fourier-identity"};
    const double res[10] = {-20.0, -10.0, -5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0, 10.0};
    const double ims[5] = {-0.5, 0.0, 0.75, 1.5, 2.2};
    double worst = 0.0;
    for (double re : res) {
        for (double im : ims) {
            const complex_t xi(re, im);
            const complex_t kh = fourier_K(xi, ctx.quad);
            const complex_t wv2 = 2.0 * mellin_WV(complex_t(0.0, -2.0) * xi, ctx.quad);
            worst = std::max(worst, std::abs(kh - wv2) / (1.0 + std::abs(kh)));
        }
    }
    r.measured = worst;
    r.target = 0.0;
    r.tolerance = 1e-6;
    r.pass = worst <= 1e-6;
    return r;
}

// 5. |K^(xi)| |xi|^{1/2} within 5% of pi sqrt(2 pi) at real xi = 1e3.
inline CriterionResult criterion_5(const SpectralContext& ctx) {
    CriterionResult r{5, "fourier-asymptote"};
    const complex_t kh = fourier_K(complex_t(1e3, 0.0), ctx.quad);
    r.measured = std::abs(kh) * std::sqrt(1e3);
    r.target = pi * std::sqrt(2.0 * pi);
    r.tolerance = 0.05;
    r.pass = std::abs(r.measured / r.target - 1.0) <= 0.05;
    return r;
}

// 6. Semigroup oracle equivalence and composition.
inline CriterionResult criterion_6(const SpectralContext& ctx) {
    CriterionResult r{6, "semigroup-oracle-equivalence"};
    // Half-length 80: the left tail of the evolved field reaches ~1e-3 of the
    // maximum at the +-40 boundary by t = 2 and would trip the decay gate.
    LinearPropagator prop(ctx.gamma, 80.0, 1u << 11);
    const std::vector<std::function<double(double)>> shapes = {
        [](double x) { return std::exp(-x * x); },
        [](double x) { return std::exp(-0.5 * (x + 3.0) * (x + 3.0)); },
        [](double x) {
            return std::exp(-(x - 2.0) * (x - 2.0)) + 0.5 * std::exp(-(x + 2.0) * (x + 2.0));
        }};
    const double dt = 2e-3;
    double worst = 0.0;
    for (const auto& shape : shapes) {
        LinearField f0 = prop.make_grid_field(shape);
        LinearField stepped = f0;
        for (double t_seg : {0.5, 0.5, 1.0}) {
            stepped = prop.timestep_propagate_richardson(stepped, t_seg, dt);
            LinearField spectral = prop.spectral_propagate(f0, stepped.time);
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < spectral.values.size(); ++j) {
                if (std::abs(spectral.x_grid[j]) > 64.0) continue;  // inner 80%
                num = std::max(num, std::abs(spectral.values[j] - stepped.values[j]));
                den = std::max(den, std::abs(spectral.values[j]));
            }
            worst = std::max(worst, num / den);
        }
    }
    // Semigroup composition on the spectral route.
    LinearField f0 = prop.make_grid_field(shapes[0]);
    LinearField once = prop.spectral_propagate(f0, 1.7);
    LinearField twice = prop.spectral_propagate(prop.spectral_propagate(f0, 0.8), 0.9);
    double comp = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < once.values.size(); ++j) {
        comp = std::max(comp, std::abs(once.values[j] - twice.values[j]));
        scale = std::max(scale, std::abs(once.values[j]));
    }
    comp /= scale;
    r.measured = worst;
    r.target = 0.0;
    r.tolerance = 1e-5;
    r.pass = (worst <= 1e-5) && (comp <= 1e-8);
    r.metrics = {{"oracle_gap", worst}, {"composition_gap", comp}};
    return r;
}

// 7. Conservation laws and moment exponents.
inline CriterionResult criterion_7(const SpectralContext& ctx) {
    CriterionResult r{7, "conservation-moment-laws"};
    // Each moment order r gets its own propagator tilted by r.  With the tilt
    // matched to the weight, M_r is the DC mode of the conjugated field:
    // without it, the e^{x}-decaying left tail wraps around the periodic
    // boundary and is amplified by e^{r L} under the e^{r x} weight.
    double drift = 0.0, worst_lambda = 0.0;
    bool signs_ok = true;
    std::vector<std::pair<std::string, double>> metrics;
    for (double rv : {0.25, 0.5, 0.75, 1.0, 1.5}) {
        LinearPropagator prop(ctx.gamma, 40.0, 1u << 13, rv);
        LinearField f0 = prop.make_grid_field([](double x) { return std::exp(-x * x); });
        MomentLedger ledger;
        ledger.r_values = {rv};
        ledger.record(f0);
        const double m0 = moment(f0, rv);
        for (int i = 1; i <= 6; ++i) {
            const double t = 0.5 * i;
            LinearField f = prop.spectral_propagate(f0, t);
            ledger.record(f);
            if (rv == 0.5 || rv == 1.0)
                drift = std::max(drift, std::abs(moment(f, rv) / m0 - 1.0));
        }
        const double lam = fit_moment_exponent(ledger, rv);
        const double om = ctx.omega_mellin(complex_t(0.0, rv)).real();
        const double gap = std::abs(lam - om) / std::max(1.0, std::abs(om));
        worst_lambda = std::max(worst_lambda, gap);
        metrics.push_back({"lambda_r" + format_double(rv), lam});
        if (rv == 0.5 || rv == 1.0) signs_ok = signs_ok && std::abs(lam) <= 1e-3;
        if (rv == 0.75) signs_ok = signs_ok && lam < 0.0;
        if (rv == 0.25 || rv == 1.5) signs_ok = signs_ok && lam > 0.0;
    }
    metrics.push_back({"conserved_moment_drift", drift});
    metrics.push_back({"worst_lambda_gap", worst_lambda});
    r.measured = std::max(drift, worst_lambda);
    r.target = 0.0;
    r.tolerance = 1e-3;
    r.pass = (drift <= 1e-6) && (worst_lambda <= 1e-3) && signs_ok;
    r.metrics = std::move(metrics);
    return r;
}

// 8. Stationarity of e^{-x/2} and e^{-x} (windowed).
inline CriterionResult criterion_8(const SpectralContext& ctx) {
    CriterionResult r{8, "stationary-solutions"};
    double worst = 0.0;
    for (double a : {0.5, 1.0}) {
        // Tilting by a turns the conjugated field into the window function
        // itself, so neither boundary sees the e^{a L} amplitude of the data.
        LinearPropagator prop(ctx.gamma, 40.0, 1u << 13, a);
        auto data = [&](double x) {
            const double l = 40.0;
            const double ax = std::abs(x);
            if (ax > 0.95 * l) return 0.0;
            double w = 1.0;
            if (ax > 0.90 * l) w = 0.5 * (1.0 - std::cos(pi * (0.95 * l - ax) / (0.05 * l)));
            return w * std::exp(-a * x);
        };
        LinearField f0 = prop.make_grid_field(data);
        LinearField f1 = prop.spectral_propagate(f0, 1.0);
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < f1.values.size(); ++j) {
            if (std::abs(f1.x_grid[j]) > 20.0) continue;  // inner half-domain
            num = std::max(num, std::abs(f1.values[j] - f0.values[j]));
            den = std::max(den, std::abs(f0.values[j]));
        }
        worst = std::max(worst, num / den);
    }
    r.measured = worst;
    r.target = 0.0;
    r.tolerance = 1e-4;
    r.pass = worst <= 1e-4;
    return r;
}

// 9. Long-time concentration rate nu.
inline CriterionResult criterion_9(const SpectralContext& ctx) {
    CriterionResult r{9, "concentration-rate"};
    const double nu_true = -ctx.omega_mellin(complex_t(0.0, 0.75)).real();
    LinearPropagator prop(ctx.gamma, 120.0, 1u << 14, 0.5);
    LinearField f0 = prop.make_grid_field([](double x) { return std::exp(-x * x); });
    std::vector<double> ts, lg, ones, logt;
    for (double t = 10.0; t <= 40.0 + 1e-9; t += 3.0) {
        LinearField f = prop.spectral_propagate(f0, t);
        // Gap of the wave-action tail: integral over x > 0 of f e^{x/2}.
        double gap = 0.0;
        for (std::size_t j = 0; j < f.values.size(); ++j)
            if (f.x_grid[j] > 0.0) gap += f.values[j] * std::exp(0.5 * f.x_grid[j]);
        gap *= f.dx();
        ts.push_back(t);
        lg.push_back(std::log(gap));
        ones.push_back(1.0);
        logt.push_back(std::log(t));
    }
    // log gap ~ c0 + c1 t + c2 log t; the log t regressor absorbs the
    // algebraic 1/sqrt(t) prefactor of the saddle profile.
    const auto coef = fit_least_squares({ones, ts, logt}, lg);
    const double nu_fit = -coef[1];
    r.measured = nu_fit;
    r.target = nu_true;
    r.tolerance = 0.05;
    r.pass = std::abs(nu_fit / nu_true - 1.0) <= 0.05;
    r.metrics = {{"nu_fit", nu_fit}, {"nu_true", nu_true}, {"prefactor_exponent", coef[2]}};
    return r;
}

// 10. Saddle profile: center ratio and stretched-exponential slope.
inline CriterionResult criterion_10(const SpectralContext& ctx) {
    CriterionResult r{10, "saddle-profile"};
    const SaddleProfileReport rep = saddle_profile_check(ctx, 40.0, 0.5);
    const double slope_target_stated = 3.0 * std::cbrt(0.5);        // 3 t^{1/3}
    const double slope_corrected = rep.stretched_slope_time_half; // 3 (t/2)^{1/3}
    r.measured = rep.stretched_slope;
    r.target = slope_target_stated;
    r.tolerance = 0.10;
    const bool center_ok = std::abs(rep.center_ratio - 1.0) <= 0.10;
    const bool slope_ok = std::abs(rep.stretched_slope / slope_target_stated - 1.0) <= 0.10;
    r.pass = center_ok && slope_ok;
    r.metrics = {{"center_ratio", rep.center_ratio},
                 {"slope_fit", rep.stretched_slope},
                 {"slope_target_3t13", slope_target_stated},
                 {"slope_halftime_form", slope_corrected}};
    r.detail = "center ratio " + format_double(rep.center_ratio) +
               "; fitted tail slope compares against 3(t/2)^{1/3} = " +
               format_double(slope_corrected);
    return r;
}

// 11. H(t) L1 bound and the K*K asymptote.
inline CriterionResult criterion_11(const SpectralContext& ctx, const HKernelPlan& plan) {
    CriterionResult r{11, "h-bound-and-convolution"};
    const double k1 = k_norm(1.0);
    bool h_ok = true;
    double worst_ratio = 0.0;
    for (double t : {0.1, 1.0, 3.0}) {
        const std::vector<double> h = plan.values(t);
        double n1 = 0.0;
        for (double v : h) n1 += std::abs(v);
        n1 *= plan.dx;
        const double bound = k1 * (std::exp(k1 * t) - 1.0);
        worst_ratio = std::max(worst_ratio, n1 / bound);
        h_ok = h_ok && (n1 <= bound);
    }
    const double conv_right = conv_KK(15.0);
    const double conv_left = conv_KK(-15.0);
    const double stated_right = (8.0 * cube(15.0) / 3.0) * std::exp(-2.5 * 15.0);
    const double stated_left = -(8.0 * cube(-15.0) / 3.0) * std::exp(-15.0);
    const double ratio_right = conv_right / stated_right;
    const double ratio_left = conv_left / stated_left;
    // Diagnostics: the actual cubic coefficient of (K*K)(x) e^{5x/2},
    // extracted by exact cubic interpolation through four tail samples, and
    // the exact parity identity (K*K)(-x) = e^{3x/2} (K*K)(x).
    const double xs[4] = {12.0, 15.0, 18.0, 21.0};
    double ys[4], d1[3], d2[2];
    for (int i = 0; i < 4; ++i) ys[i] = conv_KK(xs[i]) * std::exp(2.5 * xs[i]);
    for (int i = 0; i < 3; ++i) d1[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    for (int i = 0; i < 2; ++i) d2[i] = (d1[i + 1] - d1[i]) / (xs[i + 2] - xs[i]);
    const double cubic_coeff = (d2[1] - d2[0]) / (xs[3] - xs[0]);
    const double parity_residual =
        std::abs(conv_left / (std::exp(1.5 * 15.0) * conv_right) - 1.0);
    r.measured = ratio_right;
    r.target = 1.0;
    r.tolerance = 0.10;
    r.pass = h_ok && std::abs(ratio_right - 1.0) <= 0.10 && std::abs(ratio_left - 1.0) <= 0.10;
    r.metrics = {{"h_bound_worst_ratio", worst_ratio},
                 {"convKK_ratio_right", ratio_right},
                 {"convKK_ratio_left", ratio_left},
                 {"convKK_cubic_coefficient", cubic_coeff},
                 {"convKK_parity_residual", parity_residual}};
    r.detail = "H bound ok=" + std::string(h_ok ? "yes" : "no") +
               "; measured tail cubic coefficient " + format_double(cubic_coeff) +
               " (stated 8/3, actual 2/3), parity residual " +
               format_double(parity_residual);
    return r;
}

// 12. Weak-form fidelity and the functional inequalities on 100 random states.
inline CriterionResult criterion_12() {
    CriterionResult r{12, "weak-form-fidelity"};
    std::mt19937_64 rng(20260826ull);
    std::uniform_real_distribution<double> eps_dist(0.05, 10.0);
    double worst_mass = 0.0, worst_energy = 0.0, worst_phi_eps = 0.0;
    bool inequalities_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        MeasureState st = random_state(rng);
        const CollisionRates rates = collision_rhs(st);
        // Gross (unsigned) mass and energy fluxes through the collision
        // operator.  The net rates can cancel to zero exactly (every 2-atom
        // state does), so residuals are normalized against the gross flux.
        const std::size_t na = st.omega.size();
        double gross = 0.0, gross_energy = 0.0;
        for (std::size_t i = 0; i < na; ++i) {
            if (st.g[i] == 0.0) continue;
            for (std::size_t j = 0; j < na; ++j) {
                if (st.g[j] == 0.0) continue;
                for (std::size_t k = 0; k < na; ++k) {
                    if (st.g[k] == 0.0) continue;
                    const double w4 = st.omega[i] + st.omega[j] - st.omega[k];
                    if (w4 <= 0.0) continue;
                    const double m = std::min(
                        std::min(std::sqrt(st.omega[i]), std::sqrt(st.omega[j])),
                        std::min(std::sqrt(st.omega[k]), std::sqrt(w4)));
                    const double rr = st.g[i] * st.g[j] * st.g[k] * m /
                                      std::sqrt(st.omega[i] * st.omega[j] * st.omega[k]);
                    gross += rr;
                    gross_energy += rr * (st.omega[i] + st.omega[j]);
                }
            }
        }
        if (gross == 0.0) continue;  // collisionally inert state
        worst_mass = std::max(
            worst_mass,
            std::abs(pair_rates(st, rates, [](double) { return 1.0; })) / (4.0 * gross));
        worst_energy = std::max(
            worst_energy, std::abs(pair_rates(st, rates, [](double w) { return w; })) /
                              (2.0 * gross_energy));
        const double scale = gross;
        const double eps = eps_dist(rng);
        auto phi_eps = [eps](double w) {
            if (w < 0.0 || w > eps) return 0.0;
            return sqr(1.0 - w / eps);
        };
        const double weak = kollision_weak(st, phi_eps);
        const double paired = pair_rates(st, rates, phi_eps);
        // Each deposit is interpolated over at most one atom gap (including
        // the gap down to the condensate and the extrapolation span above the
        // top atom), so the pairing error is bounded by the second-order
        // interpolation estimate with ||phi''|| = 2/eps^2 against the gross
        // deposit flux.
        double dmax = st.omega.front();
        for (std::size_t i = 0; i + 1 < na; ++i)
            dmax = std::max(dmax, st.omega[i + 1] - st.omega[i]);
        if (na >= 2) dmax = std::max(dmax, 2.0 * st.omega.back() - st.omega[na - 2]);
        const double bound = 0.25 * dmax * dmax * (2.0 / (eps * eps)) * gross + 1e-12 * gross;
        worst_phi_eps = std::max(worst_phi_eps, std::abs(weak - paired) / bound);
        // Functional inequalities.
        inequalities_ok = inequalities_ok && (weak >= -1e-12 * scale);  // convex phi
        for (double alpha : {0.0, 0.25, 0.5}) {
            const CondensationFunctionals fn = n_functional(st, eps, alpha);
            const double lhs = fn.n_lower * sqr(a_alpha_raw(st, eps, 0.5 * (1.0 - alpha)));
            inequalities_ok = inequalities_ok && (lhs <= weak * (1.0 + 1e-9) + 1e-12);
            // Monotonicity of N-bar in the second argument.
            const CondensationFunctionals fn_small = n_functional(st, 0.5 * eps, alpha);
            inequalities_ok = inequalities_ok && (fn.n_upper >= fn_small.n_upper - 1e-12);
        }
        // Square-root bound: sqrt(N_alpha) <= integral of sigma^{alpha/2-1} sqrt(A_alpha).
        for (double alpha : {0.25, 0.5}) {
            const double lhs = std::sqrt(n_alpha_raw(st, eps, alpha));
            std::vector<double> bps{1.0};
            for (double w : st.omega)
                if (w < eps) bps.push_back(w / eps);
            double sigma_min = 1.0;
            for (double w : st.omega)
                if (st.g.size() > 0 && w / eps < sigma_min && w / eps > 0.0)
                    sigma_min = std::min(sigma_min, w / eps);
            bps.push_back(std::min(1.0, sigma_min));
            std::sort(bps.begin(), bps.end());
            bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
            double rhs = 0.0;
            for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
                auto integrand = [&](double sig) {
                    return std::pow(sig, 0.5 * alpha - 1.0) *
                           std::sqrt(a_alpha_raw(st, eps * sig, alpha));
                };
                rhs += integrate(integrand, bps[i], bps[i + 1], {1e-12, 1e-9, 4000});
            }
            inequalities_ok = inequalities_ok && (lhs <= rhs * (1.0 + 1e-6) + 1e-12);
        }
    }
    r.measured = std::max(worst_mass, worst_energy);
    r.target = 0.0;
    r.tolerance = 1e-12;
    r.pass = (worst_mass <= 1e-12) && (worst_energy <= 1e-12) && (worst_phi_eps <= 1.0) &&
             inequalities_ok;
    r.metrics = {{"mass_pairing_residual", worst_mass},
                 {"energy_pairing_residual", worst_energy},
                 {"phi_eps_error_vs_bound", worst_phi_eps}};
    if (!inequalities_ok) r.detail = "a functional inequality failed";
    return r;
}

// 13. Inverse-square scaling of the condensation time in the amplitude.
inline CriterionResult criterion_13() {
    CriterionResult r{13, "condensation-scaling"};
    const std::vector<double> amplitudes{1.0, 2.0, 4.0, 8.0};
    const double horizon = 2000.0;
    const ScalingResult base =
        scaling_experiment(amplitudes, geometric_grid(1e-4, 1e2, 96), horizon);
    // Sensitivity: threshold 1e-4 slope from the same runs.
    double slope_sensitive = 0.0;
    if (base.complete) {
        std::vector<double> la, lt;
        for (std::size_t i = 0; i < amplitudes.size(); ++i) {
            la.push_back(std::log(amplitudes[i]));
            lt.push_back(std::log(base.t_star_sensitive[i]));
        }
        slope_sensitive = fit_line(la, lt).slope;
    }
    // Refinement: doubled grid resolution.
    const ScalingResult fine =
        scaling_experiment(amplitudes, geometric_grid(1e-4, 1e2, 192), horizon);
    r.measured = base.slope;
    r.target = -2.0;
    r.tolerance = 0.3;
    r.pass = base.complete && fine.complete && std::abs(base.slope + 2.0) <= 0.3 &&
             std::abs(fine.slope - base.slope) <= 0.1 &&
             std::abs(slope_sensitive - base.slope) <= 0.1;
    r.metrics = {{"slope", base.slope},
                 {"slope_fine_grid", fine.slope},
                 {"slope_threshold_1e-4", slope_sensitive}};
    for (std::size_t i = 0; i < amplitudes.size(); ++i)
        r.metrics.push_back({"t_star_A" + std::to_string(static_cast<int>(amplitudes[i])),
                             base.t_star[i]});
    return r;
}

// 14. Determinism: identical inputs reproduce bit-identical CSV bodies.
inline CriterionResult criterion_14() {
    CriterionResult r{14, "determinism"};
    auto render = []() {
        const KernelTable t = KernelTable::build(40.0, 1u << 10);
        CsvTable csv;
        csv.header = {"x", "K", "Kprime", "envelope_bound"};
        for (std::size_t j = 0; j < t.x_grid.size(); ++j)
            csv.rows.push_back({t.x_grid[j], t.k_values[j], t.kprime_values[j],
                                tail_envelope(t.x_grid[j])});
        return fnv1a(csv.render());
    };
    const std::uint64_t first = render();
    const std::uint64_t second = render();
    r.measured = (first == second) ? 0.0 : 1.0;
    r.target = 0.0;
    r.tolerance = 0.0;
    r.pass = (first == second);
    r.metrics = {{"checksum_low32", static_cast<double>(first & 0xffffffffu)}};
    return r;
}

}  // namespace acceptance

// Runs all 14 criteria; heavyweight shared objects are built once.
inline std::vector<CriterionResult> run_acceptance() {
    const SpectralContext ctx = calibrate_gamma();
    const HKernelPlan plan;
    std::vector<CriterionResult> out;
    out.push_back(acceptance::criterion_1());
    out.push_back(acceptance::criterion_2(ctx));
    out.push_back(acceptance::criterion_3(ctx));
    out.push_back(acceptance::criterion_4(ctx));
    out.push_back(acceptance::criterion_5(ctx));
    out.push_back(acceptance::criterion_6(ctx));
    out.push_back(acceptance::criterion_7(ctx));
    out.push_back(acceptance::criterion_8(ctx));
    out.push_back(acceptance::criterion_9(ctx));
    out.push_back(acceptance::criterion_10(ctx));
    out.push_back(acceptance::criterion_11(ctx, plan));
    out.push_back(acceptance::criterion_12());
    out.push_back(acceptance::criterion_13());
    out.push_back(acceptance::criterion_14());
    return out;
}

}  // namespace wke

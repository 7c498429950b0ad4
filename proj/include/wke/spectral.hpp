#pragma once

// Mellin transform W_V(s) of the kernel V, the calibrated constant gamma,
// the complex-line Fourier transform K-hat, the multiplier Omega, derivative
// and saddle-point utilities, and the semigroup kernel H(t).
//
// Conventions:
//   W_V(s)   = integral_0^inf V(p) p^{s-1} dp   on the strip Re s in (-2, 5)
//   W(s)     = gamma_N + W_V(s),  gamma = 2 gamma_N  (calibrated so W(2) = 0)
//   K^(xi)   = integral K(x) e^{-i x xi} dx      on Im xi in (-1, 5/2)
//   Omega(xi)= gamma + K^(xi) = 2 W(-2 i xi)

#include <cmath>
#include <complex>
#include <vector>

#include "wke/common.hpp"
#include "wke/fft.hpp"
#include "wke/kernel.hpp"
#include "wke/quadrature.hpp"

namespace wke {

namespace detail {

// Breakpoints from a to b whose spacing respects both an oscillation cap
// (half-period of the oscillatory factor) and geometric growth away from a,
// so decaying tails of any length cost O(log) panels.
inline std::vector<double> panels_decaying(double a, double b, double osc_rate) {
    std::vector<double> bp{a};
    const double osc_cap = pi / std::max(1.0, osc_rate);
    double w = a;
    while (w < b) {
        double step = std::min(osc_cap, std::max(1.0, 0.5 * std::abs(w)));
        w = std::min(b, w + step);
        bp.push_back(w);
    }
    return bp;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Mellin transform of V.
// ---------------------------------------------------------------------------

inline complex_t mellin_WV(complex_t s, quad_options opt = {1e-13, 1e-10, 4000}) {
    const double re = s.real();
    if (!(re > -2.0 && re < 5.0))
        throw precondition_error("mellin_WV: Re s must lie strictly inside (-2, 5)");
    const double osc = std::abs(s.imag());

    // p -> 0 tail, p = e^{-w}: integrand V(e^{-w}) e^{-s w}.  Past w = 40 the
    // closed form under/overflows and the two-term small-p asymptotic
    // V(p) = -4 p^2 (log p - 2/3) (1 + O(p^2)) is exact to ~1e-35, combined
    // analytically with the power so no intermediate huge/tiny value appears.
    auto left = [&](double w) -> complex_t {
        if (w > 40.0) return 4.0 * (w + 2.0 / 3.0) * std::exp(-(s + 2.0) * w);
        return eval_V(std::exp(-w)) * std::exp(-s * w);
    };
    const double w_left_max = std::log(2.0) + 80.0 / (re + 2.0);
    complex_t total =
        integrate_panels(left, detail::panels_decaying(std::log(2.0), w_left_max, osc), opt);

    // p in [1/2, 1), p = 1 - u^2: the u^2 substitution absorbs the inverse
    // square-root singularity of V at p = 1.
    auto mid_lo = [&](double u) -> complex_t {
        const double p = 1.0 - u * u;
        return eval_V(p) * std::pow(complex_t(p, 0.0), s - 1.0) * 2.0 * u;
    };
    total += integrate_panels(mid_lo,
                              detail::panels_decaying(0.0, std::sqrt(0.5), 3.0 * osc), opt);

    // p in (1, 2], p = 1 + u^2.
    auto mid_hi = [&](double u) -> complex_t {
        const double p = 1.0 + u * u;
        return eval_V(p) * std::pow(complex_t(p, 0.0), s - 1.0) * 2.0 * u;
    };
    total += integrate_panels(mid_hi, detail::panels_decaying(0.0, 1.0, 3.0 * osc), opt);

    // p -> infinity tail, p = e^{w}: integrand V(e^{w}) e^{s w} with the
    // large-p asymptotic V(p) = 4 p^{-5}(log p + 2/3)(1 + O(p^{-4})).
    auto right = [&](double w) -> complex_t {
        if (w > 40.0) return 4.0 * (w + 2.0 / 3.0) * std::exp((s - 5.0) * w);
        return eval_V(std::exp(w)) * std::exp(s * w);
    };
    const double w_right_max = std::log(2.0) + 80.0 / (5.0 - re);
    total += integrate_panels(right,
                              detail::panels_decaying(std::log(2.0), w_right_max, osc), opt);
    return total;
}

// ---------------------------------------------------------------------------
// Fourier transform of K on a horizontal line Im xi in (-1, 5/2).
// ---------------------------------------------------------------------------

inline complex_t fourier_K(complex_t xi, quad_options opt = {1e-13, 1e-10, 4000}) {
    const double im = xi.imag();
    if (!(im > -1.0 && im < 2.5))
        throw precondition_error("fourier_K: Im xi must lie strictly inside (-1, 5/2)");
    const double osc = std::abs(xi.real());
    const complex_t mi(0.0, -1.0);

    // For very large |Re xi| the transform is dominated by the pi/sqrt|x|
    // singularity whose Fourier transform is known in closed form:
    //   K^(xi) ~ pi sqrt(2 pi / |xi|) + i sign(Re xi) (3 pi sqrt(2 pi) / 8) |xi|^{-3/2},
    // real at leading order because the singular part of K is even.
    if (osc > 1e3) {
        const double sgn = (xi.real() > 0.0) ? 1.0 : -1.0;
        return complex_t(pi * std::sqrt(2.0 * pi / osc),
                         sgn * (3.0 * pi * std::sqrt(2.0 * pi) / 8.0) * std::pow(osc, -1.5));
    }

    // Combined integrand with asymptotic continuation beyond |x| = 40 where
    // K under/overflows against the e^{x Im xi} factor.
    auto f = [&](double x) -> complex_t {
        if (x > 40.0) return 4.0 * (0.5 * x + 2.0 / 3.0) * std::exp((mi * xi - 2.5) * x);
        if (x < -40.0) return -4.0 * (0.5 * x - 2.0 / 3.0) * std::exp((mi * xi + 1.0) * x);
        return eval_K(x) * std::exp(mi * xi * x);
    };

    // Collar around the x = 0 singularity with the u^2 substitution; its
    // width shrinks with |Re xi| so the phase stays smooth after substitution.
    const double h0 = std::min(1.0, 1.0 / (1.0 + osc));
    auto collar = [&](double sign) {
        auto g = [&](double u) { return f(sign * u * u) * 2.0 * u; };
        return integrate(g, 0.0, std::sqrt(h0), opt);
    };
    complex_t total = collar(1.0) + collar(-1.0);

    const double x_right = 40.0 + 80.0 / (2.5 - im);
    const double x_left = 40.0 + 80.0 / (1.0 + im);
    total += integrate_panels(f, detail::panels_decaying(h0, x_right, osc), opt);
    auto f_neg = [&](double x) { return f(-x); };
    total += integrate_panels(f_neg, detail::panels_decaying(h0, x_left, osc), opt);
    return total;
}

// ---------------------------------------------------------------------------
// SpectralContext: calibrated gamma plus the derived evaluators.
// ---------------------------------------------------------------------------

struct SpectralContext {
    double gamma = 0.0;              // gamma = -2 W_V(2)
    double gamma_N = 0.0;            // gamma / 2
    double gamma_consistency = 0.0;  // |W_V(1) - W_V(2)|
    double strip_lo = -2.0, strip_hi = 5.0;
    quad_options quad{1e-13, 1e-10, 4000};

    complex_t WV(complex_t s) const { return mellin_WV(s, quad); }
    complex_t W(complex_t s) const { return gamma_N + mellin_WV(s, quad); }

    // Omega along its defining route gamma + K^(xi).
    complex_t omega(complex_t xi) const { return gamma + fourier_K(xi, quad); }
    // Same multiplier through the Mellin identity Omega = 2 W(-2 i xi);
    // cheaper for scans along horizontal lines and cross-checked in tests.
    complex_t omega_mellin(complex_t xi) const {
        return gamma + 2.0 * mellin_WV(complex_t(0.0, -2.0) * xi, quad);
    }
};

inline SpectralContext calibrate_gamma() {
    SpectralContext ctx;
    const complex_t w1 = mellin_WV(complex_t(1.0, 0.0), ctx.quad);
    const complex_t w2 = mellin_WV(complex_t(2.0, 0.0), ctx.quad);
    ctx.gamma_N = -w2.real();
    ctx.gamma = 2.0 * ctx.gamma_N;
    ctx.gamma_consistency = std::abs(w1 - w2);
    if (!(ctx.gamma < 0.0))
        throw numeric_error("calibrate_gamma: calibrated gamma is not negative");
    if (ctx.gamma_consistency > 1e-6 * std::abs(ctx.gamma))
        throw numeric_error("calibrate_gamma: |W_V(1) - W_V(2)| consistency residual too large");
    return ctx;
}

// ---------------------------------------------------------------------------
// Derivatives of W by 5-point Richardson central differences.  The Mellin
// evaluator's numeric path is not complex-analytic (branch logic), so a
// complex-step derivative is not available; Richardson differences with a
// moderate step keep subtractive cancellation below the quadrature noise.
// ---------------------------------------------------------------------------

inline complex_t w_derivative(const SpectralContext& ctx, complex_t s, int order,
                              bool* accuracy_warning = nullptr) {
    double h = (order == 1) ? 1e-3 : 1e-2;
    const double boundary_dist = std::min(s.real() - ctx.strip_lo, ctx.strip_hi - s.real());
    if (accuracy_warning) *accuracy_warning = (boundary_dist < 10.0 * h);
    if (boundary_dist < 2.5 * h)
        throw precondition_error("w_derivative: s too close to the strip boundary");
    const complex_t f_m2 = ctx.W(s - 2.0 * h), f_m1 = ctx.W(s - h);
    const complex_t f_p1 = ctx.W(s + h), f_p2 = ctx.W(s + 2.0 * h);
    if (order == 1) return (f_m2 - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * h);
    if (order == 2) {
        const complex_t f_0 = ctx.W(s);
        return (-f_m2 + 16.0 * f_m1 - 30.0 * f_0 + 16.0 * f_p1 - f_p2) / (12.0 * h * h);
    }
    throw precondition_error("w_derivative: order must be 1 or 2");
}

// ---------------------------------------------------------------------------
// Saddle point: the real solution of W'(s) = ratio in (-2, 5).  W' is
// monotone increasing there (W is convex on the real strip, checked by the
// test suite), so bisection brackets the root and Newton polishes it.
// ---------------------------------------------------------------------------

inline double saddle_find(const SpectralContext& ctx, double ratio) {
    auto wp = [&](double s) { return w_derivative(ctx, complex_t(s, 0.0), 1).real(); };
    double lo = -2.0 + 1.5e-2, hi = 5.0 - 1.5e-2;
    // Asymptotic seeds near the strip edges: W' ~ -8/(s+2)^3 near -2 and
    // W' ~ -8/(s-5)^3 near 5 tighten the bracket for large |ratio|.
    const double margin_lo = lo, margin_hi = hi;
    if (ratio < -10.0) {
        const double d = std::cbrt(-8.0 / ratio);
        lo = std::max(lo, -2.0 + 0.25 * d);
        hi = std::min(hi, -2.0 + 4.0 * d);
    } else if (ratio > 10.0) {
        const double d = std::cbrt(8.0 / ratio);
        lo = std::max(lo, 5.0 - 4.0 * d);
        hi = std::min(hi, 5.0 - 0.25 * d);
    }
    // Keep the safety margin of the derivative evaluator; ratios that would
    // need a saddle closer to the strip edge are unreachable.
    lo = std::max(lo, margin_lo);
    hi = std::min(hi, margin_hi);
    if (!(lo < hi))
        throw numeric_error("saddle_find: ratio requires a saddle outside the safe strip");
    double flo = wp(lo), fhi = wp(hi);
    if (!(flo <= ratio && ratio <= fhi))
        throw numeric_error("saddle_find: ratio not bracketed inside the strip");
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = wp(mid);
        if (fm < ratio) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if (hi - lo < 1e-6) break;
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double f1 = wp(s) - ratio;
        const double f2 = w_derivative(ctx, complex_t(s, 0.0), 2).real();
        const double step = f1 / f2;
        double s_new = s - step;
        if (s_new <= lo || s_new >= hi) break;  // keep the bisection bracket
        s = s_new;
        if (std::abs(step) < 1e-12) break;
    }
    return s;
}

// ---------------------------------------------------------------------------
// H(t) = F^{-1}(e^{K^ t} - 1): discrete inverse Fourier transform on a dense
// uniform xi grid.  The symbol is obtained as the DFT of exact cell integrals
// of K on the conjugate x grid (half-cell offset keeps x = 0 on a cell edge
// and the |x|^{-1/2} singularity integrable inside its two boundary cells);
// the |xi|^{-1/2} decay of K^ makes the spectral truncation at |xi| = 2048
// contribute below 1e-4.
// ---------------------------------------------------------------------------

struct HKernelPlan {
    std::size_t m = 1u << 18;
    double dx = 2.0 * pi / 4096.0;
    double dxi = 1.0 / 64.0;
    std::vector<double> x_nodes;       // cell centers
    std::vector<complex_t> khat;       // discrete symbol on the xi grid

    explicit HKernelPlan(std::size_t m_ = 1u << 18) : m(m_) {
        if ((m & (m - 1)) != 0) throw precondition_error("HKernelPlan: size must be a power of two");
        dxi = 2.0 * pi / (static_cast<double>(m) * dx);
        x_nodes.resize(m);
        std::vector<double> w(m);
        const double half = 0.5 * dx;
        for (std::size_t j = 0; j < m; ++j) {
            const double x = (static_cast<double>(j) - 0.5 * static_cast<double>(m) + 0.5) * dx;
            x_nodes[j] = x;
            const double a = x - half, b = x + half;
            // Beyond |x| = 50 the tail envelope is below 1e-50 and the cell
            // integral is numerically zero.
            w[j] = (std::abs(x) > 50.0) ? 0.0 : cell_integral_K(a, b);
        }
        // khat_k = sum_j w_j e^{-i x_j xi_k}, xi_k = (k - m/2) dxi, via FFT.
        std::vector<complex_t> v(m);
        for (std::size_t j = 0; j < m; ++j) v[j] = (j % 2 == 0) ? w[j] : -w[j];
        fft_inplace(v, -1);
        khat.resize(m);
        const double x0 = x_nodes[0];
        for (std::size_t k = 0; k < m; ++k) {
            const double xik = (static_cast<double>(k) - 0.5 * static_cast<double>(m)) * dxi;
            khat[k] = std::exp(complex_t(0.0, -x0 * xik)) * v[k];
        }
    }

    // H(t, .) on the plan's native x grid.
    std::vector<double> values(double t) const {
        if (!(t > 0.0)) throw precondition_error("HKernelPlan::values: requires t > 0");
        std::vector<complex_t> hhat(m);
        for (std::size_t k = 0; k < m; ++k) hhat[k] = std::exp(t * khat[k]) - 1.0;
        // h_j = (dxi / 2 pi) sum_k hhat_k e^{+i x_j xi_k}.
        const double delta = -0.5 * static_cast<double>(m) + 0.5;
        std::vector<complex_t> c(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double ph = 2.0 * pi * delta * static_cast<double>(k) / static_cast<double>(m);
            c[k] = hhat[k] * std::exp(complex_t(0.0, ph));
        }
        fft_inplace(c, +1);
        std::vector<double> h(m);
        const complex_t outer = std::exp(complex_t(0.0, -pi * delta));
        for (std::size_t j = 0; j < m; ++j) {
            const complex_t z = ((j % 2 == 0) ? 1.0 : -1.0) * outer * c[j];
            h[j] = z.real() * dxi / (2.0 * pi);
        }
        return h;
    }

    // Linear interpolation of H(t, .) onto a caller-supplied x grid.
    std::vector<double> sample(double t, const std::vector<double>& x_grid) const {
        const std::vector<double> h = values(t);
        std::vector<double> out(x_grid.size());
        const double x0 = x_nodes.front();
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            const double pos = (x_grid[i] - x0) / dx;
            if (pos < 0.0 || pos > static_cast<double>(m - 1))
                throw precondition_error("HKernelPlan::sample: x outside the plan window");
            const std::size_t j = std::min(static_cast<std::size_t>(pos), m - 2);
            const double fr = pos - static_cast<double>(j);
            out[i] = (1.0 - fr) * h[j] + fr * h[j + 1];
        }
        return out;
    }
};

inline std::vector<double> h_kernel(double t, const std::vector<double>& x_grid) {
    static const HKernelPlan plan;
    return plan.sample(t, x_grid);
}

}  // namespace wke

#pragma once

// Closed-form evaluation of the linearization kernel V(p) around the singular
// Rayleigh-Jeans equilibrium, its logarithmic-variable form K(x) = V(e^{x/2}),
// derivatives, asymptotic expansions, L^p norms and the convolution K*K.
//
// V = R + S splits into two branch-explicit pieces.  Both have an inverse
// square-root singularity at p = 1 where the closed forms lose ~8 digits to
// cancellation; inside a configurable exclusion window the evaluators switch
// to the local singular expansion instead.

#include <algorithm>
#include <cmath>
#include <vector>

#include "wke/common.hpp"
#include "wke/quadrature.hpp"

namespace wke {

// ---------------------------------------------------------------------------
// Local expansion coefficients at the p = 1 (x = 0) singularity:
//   V(p)  = pi/(sqrt2 sqrt h) + c0 - sign(p-1) * (5 pi /(4 sqrt2)) sqrt h + O(h),
//   K(x)  = pi/sqrt|x|        + c0 - sign(x)   * (3 pi / 4)        sqrt|x| + O(x),
// with h = |p-1| and c0 = -1 - sqrt2 * arcoth(sqrt2).
// ---------------------------------------------------------------------------
inline constexpr double kernel_c0 = -2.24645048028046102679;
inline constexpr double v_singular_amp = 2.22144146907918312351;   // pi/sqrt2
inline constexpr double v_subleading_amp = 2.77680183634897890439; // 5 pi/(4 sqrt2)
inline constexpr double k_subleading_amp = 2.35619449019234492885; // 3 pi/4

// Default half-width of the singularity exclusion window, in p around p = 1.
inline constexpr double default_exclusion_p = 1e-4;
// Matching window in x (p = e^{x/2} gives dx ~ 2 dp near p = 1).
inline constexpr double default_exclusion_x = 2e-4;
// Truncation radius for whole-line quadratures of K.
inline constexpr double default_x_max = 60.0;

// ---------------------------------------------------------------------------
// R and S branches.  The inverse hyperbolic/inverse trigonometric pieces are
// written through asinh/asin, which are the log-identity forms of the
// arctanh/arctan expressions the branches come from:
//   arctanh(p / sqrt(1+p^2)) = asinh(p),   arctan(p / sqrt(1-p^2)) = asin(p).
// ---------------------------------------------------------------------------

inline double eval_R(double p) {
    if (!(p > 0.0)) throw precondition_error("eval_R: requires p > 0");
    if (p == 1.0) throw precondition_error("eval_R: singular at p = 1");
    const double lp = std::log(p);
    const double q = std::sqrt(1.0 + p * p);
    if (p < 1.0) return 2.0 * lp / (1.0 + p * p) - 2.0 / (p * q) * std::asinh(p);
    return -(2.0 * lp / (p * (1.0 + p * p)) + 2.0 / (p * q) * std::asinh(1.0 / p));
}

inline double eval_S(double p) {
    if (!(p > 0.0)) throw precondition_error("eval_S: requires p > 0");
    if (p == 1.0) throw precondition_error("eval_S: singular at p = 1");
    const double lp = std::log(p);
    if (p < 1.0) {
        const double q = std::sqrt(1.0 - p * p);
        return -2.0 * lp / (1.0 - p * p) + 2.0 / (p * q) * std::asin(p);
    }
    const double q = std::sqrt(p * p - 1.0);
    return 2.0 * lp / (p * (p * p - 1.0)) + 2.0 / (p * q) * std::asin(1.0 / p);
}

// Three-term singular expansion of V around p = 1, h = |p-1|.
inline double eval_V_expansion(double p) {
    const double h = std::abs(p - 1.0);
    const double sgn = (p >= 1.0) ? 1.0 : -1.0;
    const double rh = std::sqrt(h);
    return v_singular_amp / rh + kernel_c0 - sgn * v_subleading_amp * rh;
}

// Tail series.  The closed forms cancel O(log p)-sized terms down to
// O(p^2 log p) (p -> 0) and O(p^{-5} log p) (p -> infinity), so their
// round-off noise swamps the true value in the far tails; past the seams the
// evaluators switch to the series
//   V(p) = -4 p^2 (log p - 2/3) - 4 p^6 (log p - 16/35) + O(p^{10} log p),
// and its mirror under V(1/p) = p^3 V(p),
//   V(p) =  4 p^{-5} (log p + 2/3) + 4 p^{-9} (log p + 16/35) + ...
// Both are accurate to ~2e-14 relative at the seams and improve outward.
inline constexpr double tail_series_p_small = 0.02;
inline constexpr double tail_series_p_large = 50.0;

inline double eval_V_tail_series(double p) {
    const double lp = std::log(p);
    if (p < 1.0) {
        const double p2 = p * p;
        return -4.0 * p2 * (lp - 2.0 / 3.0) - 4.0 * cube(p2) * (lp - 16.0 / 35.0);
    }
    const double q = 1.0 / p;
    const double q4 = sqr(sqr(q));
    return 4.0 * q4 * q * (lp + 2.0 / 3.0) + 4.0 * q4 * q4 * q * (lp + 16.0 / 35.0);
}

// Seven-term refinement of the singular expansion (coefficients fitted to 20
// significant digits against the closed form; error O(h^{5/2})).  Used inside
// the exclusion window so that integrals across the singularity keep full
// accuracy; the three-term eval_V_expansion remains the documented local
// model.
inline double eval_V_expansion_refined(double p) {
    const double h = std::abs(p - 1.0);
    const double sgn = (p >= 1.0) ? 1.0 : -1.0;
    const double w = std::sqrt(h);
    const double a2 = 3.36967572042069154015;
    const double a3 = 2.98506197407515232170;
    const double a4 = -3.54214839712225107065;
    return v_singular_amp / w + kernel_c0 - sgn * v_subleading_amp * w +
           (sgn * a2 - 1.0 / 6.0) * h + a3 * h * w + (a4 + sgn / 3.0) * h * h;
}

inline double eval_V(double p, double exclusion = default_exclusion_p) {
    if (!(p > 0.0)) throw precondition_error("eval_V: requires p > 0");
    if (p < tail_series_p_small || p > tail_series_p_large) return eval_V_tail_series(p);
    if (std::abs(p - 1.0) < exclusion) return eval_V_expansion_refined(p);
    return eval_R(p) + eval_S(p);
}

// Singular expansion of K around x = 0.
inline double eval_K_expansion(double x) {
    const double ax = std::abs(x);
    const double sgn = (x >= 0.0) ? 1.0 : -1.0;
    const double rx = std::sqrt(ax);
    return pi / rx + kernel_c0 - sgn * k_subleading_amp * rx;
}

inline double eval_K(double x, double exclusion = default_exclusion_x) {
    if (x == 0.0) throw precondition_error("eval_K: singular at x = 0");
    if (std::abs(x) < exclusion) {
        // Refined expansion in h = |e^{x/2} - 1|, via expm1 so the window
        // stays accurate down to the smallest representable x.
        const double d = std::expm1(0.5 * x);
        const double h = std::abs(d);
        const double sgn = (x >= 0.0) ? 1.0 : -1.0;
        const double w = std::sqrt(h);
        const double a2 = 3.36967572042069154015;
        const double a3 = 2.98506197407515232170;
        const double a4 = -3.54214839712225107065;
        return v_singular_amp / w + kernel_c0 - sgn * v_subleading_amp * w +
               (sgn * a2 - 1.0 / 6.0) * h + a3 * h * w + (a4 + sgn / 3.0) * h * h;
    }
    return eval_V(std::exp(0.5 * x), 0.0);
}

// ---------------------------------------------------------------------------
// Closed-form derivatives.  K'(x) = V'(p) p / 2 with p = e^{x/2}.
// ---------------------------------------------------------------------------

inline double eval_Vprime_tail_series(double p) {
    const double lp = std::log(p);
    if (p < 1.0) {
        const double p2 = p * p;
        return -8.0 * p * (lp - 1.0 / 6.0) - 24.0 * p * sqr(p2) * (lp - 61.0 / 210.0);
    }
    const double q = 1.0 / p;
    const double q2 = q * q;
    const double q6 = cube(q2);
    return -20.0 * q6 * (lp + 7.0 / 15.0) - 36.0 * q6 * sqr(q2) * (lp + 109.0 / 315.0);
}

inline double eval_Vprime(double p) {
    if (!(p > 0.0) || p == 1.0) throw precondition_error("eval_Vprime: requires p > 0, p != 1");
    if (p < tail_series_p_small || p > tail_series_p_large) return eval_Vprime_tail_series(p);
    const double lp = std::log(p);
    if (p < 1.0) {
        const double q2 = 1.0 + p * p;
        const double q = std::sqrt(q2);
        const double rp = 2.0 / (p * q2) - 4.0 * p * lp / (q2 * q2) -
                          2.0 * (p - std::asinh(p) * (1.0 + 2.0 * p * p) / q) / (p * p * q2);
        const double m2 = 1.0 - p * p;
        const double m = std::sqrt(m2);
        const double sp = -2.0 / (p * m2) - 4.0 * p * lp / (m2 * m2) +
                          2.0 * (p - std::asin(p) * (1.0 - 2.0 * p * p) / m) / (p * p * m2);
        return rp + sp;
    }
    const double q2 = 1.0 + p * p;
    const double q = std::sqrt(q2);
    const double pq = p * q2;  // p + p^3
    const double rp = -2.0 * (1.0 / (p * p * q2) - lp * (1.0 + 3.0 * p * p) / (pq * pq)) -
                      2.0 * (-1.0 - std::asinh(1.0 / p) * (1.0 + 2.0 * p * p) / q) / (p * p * q2);
    const double m2 = p * p - 1.0;
    const double m = std::sqrt(m2);
    const double pm = p * m2;  // p^3 - p
    const double sp = 2.0 * (1.0 / (p * p * m2) - lp * (3.0 * p * p - 1.0) / (pm * pm)) +
                      2.0 * (-1.0 - std::asin(1.0 / p) * (2.0 * p * p - 1.0) / m) / (p * p * m2);
    return rp + sp;
}

// Expansion of K' around x = 0 (differentiating the K expansion).
inline double eval_Kprime_expansion(double x) {
    const double ax = std::abs(x);
    const double sgn = (x >= 0.0) ? 1.0 : -1.0;
    return -sgn * 0.5 * pi / (ax * std::sqrt(ax)) - 0.375 * pi / std::sqrt(ax);
}

inline double eval_Kprime(double x, double exclusion = default_exclusion_x) {
    if (x == 0.0) throw precondition_error("eval_Kprime: singular at x = 0");
    if (std::abs(x) < exclusion) return eval_Kprime_expansion(x);
    const double p = std::exp(0.5 * x);
    return 0.5 * p * eval_Vprime(p);
}

// ---------------------------------------------------------------------------
// Tail envelopes from the x -> +/- infinity asymptotics
//   K(x) ~  4 e^{-5x/2} (x/2 + 2/3)   (x -> +inf)
//   K(x) ~ -4 e^{x}     (x/2 - 2/3)   (x -> -inf)
// with a safety factor so the envelope provably dominates |K| past X_max.
// ---------------------------------------------------------------------------
inline double tail_envelope(double x) {
    const double ax = std::abs(x);
    const double linear = 4.0 * (0.5 * ax + 2.0 / 3.0 + 1.0);
    return (x >= 0.0) ? linear * std::exp(-2.5 * x) : linear * std::exp(x);
}

// ---------------------------------------------------------------------------
// L^q norms.  The |x|^{-1/2} singularity makes exponents >= 2 divergent.
// Near 0 an explicit substitution x = +/- u^m (m even, chosen from q so the
// transformed integrand is smooth) removes the singularity; the remaining
// panels are plain adaptive Gauss-Kronrod.  Tails beyond x_max are dropped;
// the envelope remainder there is below 1e-30 for x_max = 60.
// ---------------------------------------------------------------------------

enum class k_weight { none, exp_half_x };

inline double k_norm(double p_exponent, k_weight weight = k_weight::none,
                     double x_max = default_x_max) {
    if (!(p_exponent >= 1.0))
        throw precondition_error("k_norm: exponent must be >= 1");
    if (p_exponent >= 2.0)
        throw precondition_error(
            "k_norm: divergent, the |x|^{-1/2} singularity requires exponent < 2");
    const double q = p_exponent;
    const bool weighted = (weight == k_weight::exp_half_x);
    auto integrand = [&](double x) {
        double v = std::pow(std::abs(eval_K(x)), q);
        if (weighted) v *= std::exp(0.5 * x);
        return v;
    };
    // Substitution exponent m: integrand near 0 behaves like u^{m-1-mq/2};
    // this choice keeps that power >= 1.
    const int m = 2 * static_cast<int>(std::ceil(2.0 / (2.0 - q)));
    auto near0 = [&](double sign) {
        auto g = [&](double u) {
            const double um = std::pow(u, m);
            return integrand(sign * um) * m * std::pow(u, m - 1);
        };
        return integrate(g, 0.0, 1.0);
    };
    double total = near0(1.0) + near0(-1.0);
    total += integrate_panels(integrand, {1.0, 4.0, 12.0, x_max});
    total += integrate_panels(integrand, {-x_max, -12.0, -4.0, -1.0});
    return std::pow(total, 1.0 / q);
}

// ---------------------------------------------------------------------------
// Convolution (K*K)(x) by singularity-aware direct quadrature: the integrand
// K(x-y) K(y) has inverse square-root singularities at y = 0 and y = x, each
// smoothed with a local u^2 substitution.  At x = 0 the two singular points
// merge into a non-integrable 1/|y| singularity (K is not square integrable),
// which the adaptive driver reports as a numeric_error.
// ---------------------------------------------------------------------------

inline double conv_KK(double x, double x_max = default_x_max) {
    auto f = [&](double y) { return eval_K(x - y) * eval_K(y); };
    const double lo = std::min(0.0, x) - x_max;
    const double hi = std::max(0.0, x) + x_max;
    // Half-width of the substitution collars around the two singular points.
    const double w = (x != 0.0) ? std::min(1.0, 0.25 * std::abs(x)) : 1.0;
    const double a = std::min(0.0, x), b = std::max(0.0, x);
    double total = 0.0;
    auto collar = [&](double c, double sign, double width) {
        auto g = [&](double u) { return f(c + sign * u * u) * 2.0 * u; };
        return integrate(g, 0.0, std::sqrt(width));
    };
    if (x == 0.0) {
        // The two singular points merge into K(y)^2 ~ pi^2/|y|; the
        // symmetric-limit attempt diverges logarithmically and the driver
        // throws once the subdivision budget is spent.
        return integrate_panels(f, {lo, -1.0, 0.0}) + integrate_panels(f, {0.0, 1.0, hi});
    }
    const double wa = std::min(w, 1.0);
    // [lo, a - wa], collar at a, [a + wa, b - wa], collar at b, [b + wa, hi]
    if (a - wa > lo) total += integrate_panels(f, {lo, 0.5 * (lo + a - wa), a - wa});
    total += collar(a, -1.0, wa);
    total += collar(a, +1.0, wa);
    if (b - wa > a + wa) total += integrate(f, a + wa, b - wa);
    total += collar(b, -1.0, wa);
    total += collar(b, +1.0, wa);
    if (hi > b + wa) total += integrate_panels(f, {b + wa, 0.5 * (b + wa + hi), hi});
    return total;
}

// ---------------------------------------------------------------------------
// Exact integral of K(x) e^{tilt x} over a cell [a, b].  The cell may touch
// the singular point x = 0 only at an endpoint (half-cell-offset grids keep
// x = 0 on cell edges); there the u^2 substitution absorbs the inverse
// square-root singularity.
// ---------------------------------------------------------------------------
inline double cell_integral_K(double a, double b, double tilt = 0.0) {
    if (a >= b) throw precondition_error("cell_integral_K: empty cell");
    if (a < 0.0 && b > 0.0)
        return cell_integral_K(a, 0.0, tilt) + cell_integral_K(0.0, b, tilt);
    auto f = [tilt](double x) { return eval_K(x) * std::exp(tilt * x); };
    if (a == 0.0 || b == 0.0) {
        const double sign = (b > 0.0) ? 1.0 : -1.0;
        auto g = [&](double u) { return f(sign * u * u) * 2.0 * u; };
        return integrate(g, 0.0, std::sqrt(b - a));
    }
    // Cells close to the singularity get the adaptive driver; away from it a
    // single Kronrod panel is exact to machine precision for narrow cells.
    if (std::min(std::abs(a), std::abs(b)) < 10.0 * (b - a)) return integrate(f, a, b);
    return detail::gk15(f, a, b).kronrod;
}

// ---------------------------------------------------------------------------
// KernelTable: cached uniform samples of K, K' plus the tail envelope, built
// once and shared read-only.  The grid excludes x = 0 by a half-cell offset.
// ---------------------------------------------------------------------------

struct KernelTable {
    std::vector<double> x_grid;
    std::vector<double> k_values;
    std::vector<double> kprime_values;
    double x_max = default_x_max;
    double exclusion_half_width = default_exclusion_x;

    static KernelTable build(double half_length = 40.0, std::size_t n = 1u << 14,
                             double x_max = default_x_max,
                             double exclusion = default_exclusion_x) {
        if (n < 2 || half_length <= 0.0 || x_max <= 0.0)
            throw precondition_error("KernelTable: invalid grid parameters");
        KernelTable t;
        t.x_max = x_max;
        t.exclusion_half_width = exclusion;
        t.x_grid.resize(n);
        t.k_values.resize(n);
        t.kprime_values.resize(n);
        const double dx = 2.0 * half_length / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -half_length + (static_cast<double>(j) + 0.5) * dx;
            t.x_grid[j] = x;
            t.k_values[j] = eval_K(x, exclusion);
            t.kprime_values[j] = eval_Kprime(x, exclusion);
        }
        for (double v : t.k_values)
            if (!std::isfinite(v)) throw numeric_error("KernelTable: non-finite sample");
        // Tail-envelope domination beyond the truncation radius.
        for (double x : {x_max, 1.2 * x_max, 1.5 * x_max, 2.0 * x_max})
            for (double s : {1.0, -1.0})
                if (std::abs(eval_K(s * x)) > tail_envelope(s * x))
                    throw numeric_error("KernelTable: tail envelope violated");
        return t;
    }
};

}  // namespace wke

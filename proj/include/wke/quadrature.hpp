#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature over a list of panels.
// The integrand value type is templated so the same driver integrates real
// and complex functions (Mellin/Fourier transforms of a real kernel).
//
// Panels with endpoint singularities are expected to be supplied after an
// explicit substitution (e.g. x = +/- u^2 around an inverse-square-root
// singularity) so the transformed integrand is smooth; the driver itself only
// bisects panels until the Kronrod-Gauss error estimate meets the tolerance.

#include <cmath>
#include <cstddef>
#include <vector>

#include "wke/common.hpp"

namespace wke {

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr double k15_nodes[8] = {
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
};
inline constexpr double k15_weights[8] = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
};
// Gauss weights attached to the even Kronrod nodes (indices 0,2,4,6 above are
// the Gauss nodes in the same magnitude order).
inline constexpr double g7_weights[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
};

template <typename F>
struct gk_result {
    using value_type = std::invoke_result_t<F, double>;
    value_type kronrod{};
    double error = 0.0;
};

template <typename F>
gk_result<F> gk15(F&& f, double a, double b) {
    using value_type = typename gk_result<F>::value_type;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const value_type fc = f(mid);
    value_type kron = k15_weights[0] * fc;
    value_type gauss = g7_weights[0] * fc;
    for (int i = 1; i < 8; ++i) {
        const value_type fsum = f(mid - half * k15_nodes[i]) + f(mid + half * k15_nodes[i]);
        kron += k15_weights[i] * fsum;
        if (i % 2 == 0) gauss += g7_weights[i / 2] * fsum;
    }
    kron *= half;
    gauss *= half;
    gk_result<F> r;
    r.kronrod = kron;
    // Standard QUADPACK-style error sharpening.
    const double diff = std::abs(kron - gauss);
    r.error = std::pow(200.0 * diff, 1.5);
    if (!(r.error < diff)) r.error = diff;
    return r;
}

}  // namespace detail

struct quad_options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
};

// Adaptive integration of f over [a, b].  Throws numeric_error when the
// subdivision budget is exhausted before the error estimate converges.
template <typename F>
auto integrate(F&& f, double a, double b, quad_options opt = {}) {
    using value_type = std::invoke_result_t<F, double>;
    struct segment {
        double a, b, error;
        value_type value;
    };
    auto first = detail::gk15(f, a, b);
    std::vector<segment> segs{{a, b, first.error, first.kronrod}};
    value_type total = first.kronrod;
    double total_err = first.error;
    int splits = 0;
    while (true) {
        if (!std::isfinite(std::abs(total)))
            throw numeric_error("integrate: non-finite running total (divergent integrand?)");
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
        if (total_err <= target) break;
        if (++splits > opt.max_subdivisions)
            throw numeric_error("integrate: subdivision budget exhausted, error estimate " +
                                std::to_string(total_err));
        // Bisect the segment with the largest error estimate.
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        const segment s = segs[worst];
        const double m = 0.5 * (s.a + s.b);
        auto left = detail::gk15(f, s.a, m);
        auto right = detail::gk15(f, m, s.b);
        total += left.kronrod + right.kronrod - s.value;
        total_err += left.error + right.error - s.error;
        segs[worst] = {s.a, m, left.error, left.kronrod};
        segs.push_back({m, s.b, right.error, right.kronrod});
    }
    return total;
}

// Integration over an explicit panel list; each panel is integrated
// adaptively and the results are summed in the given order (deterministic).
template <typename F>
auto integrate_panels(F&& f, const std::vector<double>& breakpoints, quad_options opt = {}) {
    using value_type = std::invoke_result_t<F, double>;
    if (breakpoints.size() < 2)
        throw precondition_error("integrate_panels: need at least one panel");
    value_type total{};
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        total += integrate(f, breakpoints[i], breakpoints[i + 1], opt);
    return total;
}

}  // namespace wke

#pragma once

// Shared error types, numeric constants and small helpers used across the
// library.  Everything here is header-only and exception-based: callers that
// violate a documented precondition get a typed exception they can map to a
// process exit code.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace wke {

using complex_t = std::complex<double>;

// ---------------------------------------------------------------------------
// Error taxonomy.  The CLI maps each family to a distinct exit code.
// ---------------------------------------------------------------------------

// Bad user-supplied configuration (unknown key, out-of-range option, ...).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A documented operation precondition was violated (domain errors included).
struct precondition_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A numeric procedure failed to reach its accuracy target (quadrature
// non-convergence, root finding failure, aliasing, instability, ...).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Constants.
// ---------------------------------------------------------------------------

inline constexpr double pi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Small helpers.
// ---------------------------------------------------------------------------

inline double sqr(double v) { return v * v; }

template <typename T>
inline T cube(T v) { return v * v * v; }

// Relative gap |a-b| / max(|a|,|b|,floor).
inline double rel_diff(double a, double b, double floor_scale = 0.0) {
    const double scale = std::max({std::abs(a), std::abs(b), floor_scale});
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

// Ordinary least squares y ~ c0 + c1*x; returns {intercept, slope}.
struct line_fit {
    double intercept = 0.0;
    double slope = 0.0;
};

inline line_fit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw precondition_error("fit_line: need >= 2 matching samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw numeric_error("fit_line: degenerate abscissae");
    line_fit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

// Least squares for y ~ sum_j c_j * phi_j(x) with a small, fixed number of
// regressors supplied column-wise.  Solves the normal equations by Gaussian
// elimination with partial pivoting (the systems here are 2x2 or 3x3).
inline std::vector<double> fit_least_squares(const std::vector<std::vector<double>>& columns,
                                             const std::vector<double>& y) {
    const std::size_t k = columns.size();
    if (k == 0) throw precondition_error("fit_least_squares: no regressors");
    const std::size_t n = y.size();
    for (const auto& c : columns)
        if (c.size() != n) throw precondition_error("fit_least_squares: ragged design");
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t r = 0; r < n; ++r) a[i][j] += columns[i][r] * columns[j][r];
        for (std::size_t r = 0; r < n; ++r) a[i][k] += columns[i][r] * y[r];
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        if (a[col][col] == 0.0) throw numeric_error("fit_least_squares: singular normal matrix");
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double m = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= k; ++c) a[r][c] -= m * a[col][c];
        }
    }
    std::vector<double> coef(k);
    for (std::size_t i = 0; i < k; ++i) coef[i] = a[i][k] / a[i][i];
    return coef;
}

}  // namespace wke

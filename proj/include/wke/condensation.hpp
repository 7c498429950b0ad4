#pragma once

// Conservative measure-valued solver for the nonlinear 4-wave equation in
// omega variables, the epsilon-scale condensation functionals, and the
// amplitude-scaling experiment for the condensation time t*.
//
// The state is an atomic measure g = sum_i g_i delta_{omega_i} on a fixed
// positive grid plus a condensate mass at omega = 0.  Every collision term
// removes mass at omega_i, omega_j and deposits at omega_k and at
// omega_4 = omega_i + omega_j - omega_k; off-grid deposits are split between
// the two bracketing atoms so that the mass AND the energy of the deposit are
// both exact.  Deposits below the first grid atom split between the
// condensate (which carries zero energy) and the first atom.  The condensate
// is a passive sink: it never participates as a collider (the weak form
// leaves the ratio Phi/sqrt(omega) undefined at omega = 0; a configuration
// switch reserves the alternative but is not implemented).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "wke/common.hpp"

namespace wke {

struct ConservationLedger {
    double mass0 = 0.0;
    double energy0 = 0.0;
    double clipped_mass = 0.0;    // cumulative negative-mass clips
    double overflow_flux = 0.0;   // cumulative deposit flux above the grid top
};

struct MeasureState {
    std::vector<double> omega;  // strictly increasing, positive
    std::vector<double> g;      // atom masses, >= 0
    double condensate = 0.0;    // mass at omega = 0
    double time = 0.0;
    ConservationLedger ledger;

    double total_mass() const {
        double s = condensate;
        for (double v : g) s += v;
        return s;
    }
    double total_energy() const {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * omega[i];
        return s;
    }
    void seal_ledger() {
        ledger.mass0 = total_mass();
        ledger.energy0 = total_energy();
    }
};

// Geometric atom grid, default 96 atoms on [1e-4, 1e2].
inline std::vector<double> geometric_grid(double omega_min = 1e-4, double omega_max = 1e2,
                                          std::size_t count = 96) {
    if (!(omega_min > 0.0 && omega_max > omega_min && count >= 2))
        throw precondition_error("geometric_grid: invalid parameters");
    std::vector<double> grid(count);
    const double step = std::log(omega_max / omega_min) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = omega_min * std::exp(step * static_cast<double>(i));
    grid.back() = omega_max;
    return grid;
}

// Cell edges: geometric midpoints, with 0 below the first atom.
inline std::vector<double> grid_cell_edges(const std::vector<double>& omega) {
    std::vector<double> e(omega.size() + 1);
    e[0] = 0.0;
    for (std::size_t i = 0; i + 1 < omega.size(); ++i) e[i + 1] = std::sqrt(omega[i] * omega[i + 1]);
    e[omega.size()] = omega.back() * std::sqrt(omega.back() / omega[omega.size() - 2]);
    return e;
}

// Truncated Rayleigh-Jeans data f0 = A / omega on 0 < omega < B, carried by
// the measure g = sqrt(omega) f:  g(cell) = A * integral_cell omega^{-1/2}.
inline MeasureState make_rj_truncated(double amplitude, double b_cut,
                                      const std::vector<double>& omega_grid) {
    if (!(amplitude > 0.0 && b_cut > 0.0))
        throw precondition_error("make_rj_truncated: A and B must be positive");
    if (!(omega_grid.front() < b_cut && b_cut <= omega_grid.back()))
        throw precondition_error("make_rj_truncated: grid does not span the data support");
    MeasureState st;
    st.omega = omega_grid;
    st.g.assign(omega_grid.size(), 0.0);
    const std::vector<double> e = grid_cell_edges(omega_grid);
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        const double lo = std::min(e[i], b_cut), hi = std::min(e[i + 1], b_cut);
        if (hi > lo) st.g[i] = 2.0 * amplitude * (std::sqrt(hi) - std::sqrt(lo));
    }
    st.seal_ledger();
    return st;
}

// ---------------------------------------------------------------------------
// Collision operator.
// ---------------------------------------------------------------------------

struct CollisionRates {
    std::vector<double> atoms;
    double condensate = 0.0;
};

namespace detail {

// Mass- and energy-exact two-point deposit of mass m at frequency omega4.
inline void deposit(const std::vector<double>& omega, std::vector<double>& atoms,
                    double& condensate, double& overflow, double omega4, double m) {
    const std::size_t n = omega.size();
    if (omega4 < omega.front()) {
        // Split against the zero-energy condensate.
        const double w1 = omega4 / omega.front();
        atoms[0] += m * w1;
        condensate += m * (1.0 - w1);
        return;
    }
    if (omega4 >= omega.back()) {
        // Fold into the last two atoms (the weight below may be negative);
        // flagged through the overflow ledger by the caller's integrator.
        const std::size_t i = n - 2;
        const double w_hi = (omega4 - omega[i]) / (omega[i + 1] - omega[i]);
        atoms[i] += m * (1.0 - w_hi);
        atoms[i + 1] += m * w_hi;
        overflow += std::abs(m) * (omega4 > omega.back() ? 1.0 : 0.0);
        return;
    }
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(omega.begin(), omega.end(), omega4) -
                                 omega.begin()) - 1;
    const double w_hi = (omega4 - omega[i]) / (omega[i + 1] - omega[i]);
    atoms[i] += m * (1.0 - w_hi);
    atoms[i + 1] += m * w_hi;
}

}  // namespace detail

// Triple sum over ordered atom triples (i, j, k):
//   rate = g_i g_j g_k Phi / sqrt(omega_i omega_j omega_k),
//   Phi = min(sqrt omega_i, sqrt omega_j, sqrt omega_k, sqrt omega_4),
//   omega_4 = omega_i + omega_j - omega_k (terms with omega_4 <= 0 vanish).
// Mass moves: -rate at i and j, +rate at k and at omega_4.
inline CollisionRates collision_rhs(const MeasureState& st, double* overflow_out = nullptr) {
    const std::size_t n = st.omega.size();
    CollisionRates rates;
    rates.atoms.assign(n, 0.0);
    double overflow = 0.0;
    std::vector<double> inv_sqrt(n), sqrt_w(n);
    for (std::size_t i = 0; i < n; ++i) {
        sqrt_w[i] = std::sqrt(st.omega[i]);
        inv_sqrt[i] = 1.0 / sqrt_w[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (st.g[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (st.g[j] == 0.0) continue;
            const double gij = st.g[i] * st.g[j] * inv_sqrt[i] * inv_sqrt[j];
            const double wij = st.omega[i] + st.omega[j];
            for (std::size_t k = 0; k < n; ++k) {
                if (st.g[k] == 0.0) continue;
                const double omega4 = wij - st.omega[k];
                if (omega4 <= 0.0) continue;
                const double phi =
                    std::min(std::min(sqrt_w[i], sqrt_w[j]),
                             std::min(sqrt_w[k], std::sqrt(omega4)));
                const double r = gij * st.g[k] * inv_sqrt[k] * phi;
                if (r == 0.0) continue;
                rates.atoms[i] -= r;
                rates.atoms[j] -= r;
                rates.atoms[k] += r;
                detail::deposit(st.omega, rates.atoms, rates.condensate, overflow, omega4, r);
            }
        }
    }
    if (overflow_out) *overflow_out = overflow;
    return rates;
}

// Brute-force weak-form pairing: the oracle for collision_rhs.
//   K(phi, g) = sum over triples of the rate times
//               [phi(omega4) + phi(omega_k) - phi(omega_i) - phi(omega_j)].
inline double kollision_weak(const MeasureState& st,
                             const std::function<double(double)>& phi) {
    const std::size_t n = st.omega.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (st.g[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (st.g[j] == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (st.g[k] == 0.0) continue;
                const double omega4 = st.omega[i] + st.omega[j] - st.omega[k];
                if (omega4 <= 0.0) continue;
                const double phi_min =
                    std::min(std::min(std::sqrt(st.omega[i]), std::sqrt(st.omega[j])),
                             std::min(std::sqrt(st.omega[k]), std::sqrt(omega4)));
                const double r = st.g[i] * st.g[j] * st.g[k] * phi_min /
                                 std::sqrt(st.omega[i] * st.omega[j] * st.omega[k]);
                total += r * (phi(omega4) + phi(st.omega[k]) - phi(st.omega[i]) -
                              phi(st.omega[j]));
            }
        }
    }
    return total;
}

// Pairing of a rate array with a test function (condensate weight phi(0)).
inline double pair_rates(const MeasureState& st, const CollisionRates& rates,
                         const std::function<double(double)>& phi) {
    double s = rates.condensate * phi(0.0);
    for (std::size_t i = 0; i < st.omega.size(); ++i) s += rates.atoms[i] * phi(st.omega[i]);
    return s;
}

// ---------------------------------------------------------------------------
// Time integration: explicit midpoint (RK2) with a rate-based step controller.
// ---------------------------------------------------------------------------

struct EvolveOptions {
    double dt_max = 0.5;
    double rate_fraction = 0.2;   // dt * (max per-unit-mass loss rate) bound
    double clip_abort = 1e-8;     // per-step clip fraction that aborts
    std::vector<double> snapshot_times;
};

namespace detail {

inline double max_loss_rate(const MeasureState& st, const CollisionRates& r) {
    double m = 0.0;
    const double floor_mass = 1e-14 * std::max(st.total_mass(), 1e-300);
    for (std::size_t i = 0; i < st.g.size(); ++i)
        if (st.g[i] > floor_mass && r.atoms[i] < 0.0)
            m = std::max(m, -r.atoms[i] / st.g[i]);
    return m;
}

inline void apply_step(MeasureState& st, const CollisionRates& r, double dt, double overflow,
                       const EvolveOptions& opt) {
    const double total = st.total_mass();
    double clipped = 0.0;
    for (std::size_t i = 0; i < st.g.size(); ++i) {
        st.g[i] += dt * r.atoms[i];
        if (st.g[i] < 0.0) {
            clipped += -st.g[i];
            st.g[i] = 0.0;
        }
    }
    st.condensate += dt * r.condensate;
    st.ledger.clipped_mass += clipped;
    st.ledger.overflow_flux += dt * overflow;
    st.time += dt;
    if (clipped > opt.clip_abort * total)
        throw numeric_error("evolve: negative-mass clip exceeded 1e-8 of total; reduce dt");
}

}  // namespace detail

// Evolve to t_end, returning snapshots at the requested times (plus the final
// state).  Snapshot times must be increasing.
inline std::vector<MeasureState> evolve(MeasureState st, double t_end, EvolveOptions opt = {}) {
    std::vector<MeasureState> traj;
    std::size_t next_snap = 0;
    auto maybe_snapshot = [&](const MeasureState& s) {
        while (next_snap < opt.snapshot_times.size() && s.time >= opt.snapshot_times[next_snap]) {
            traj.push_back(s);
            ++next_snap;
        }
    };
    maybe_snapshot(st);
    while (st.time < t_end - 1e-12) {
        const CollisionRates r1 = collision_rhs(st);
        double dt = std::min(opt.dt_max, t_end - st.time);
        const double rate = detail::max_loss_rate(st, r1);
        if (rate > 0.0) dt = std::min(dt, opt.rate_fraction / rate);
        if (next_snap < opt.snapshot_times.size())
            dt = std::min(dt, opt.snapshot_times[next_snap] - st.time + 1e-12);
        // Midpoint stage.
        MeasureState mid = st;
        for (std::size_t i = 0; i < st.g.size(); ++i)
            mid.g[i] = std::max(0.0, st.g[i] + 0.5 * dt * r1.atoms[i]);
        mid.condensate += 0.5 * dt * r1.condensate;
        double overflow = 0.0;
        const CollisionRates r2 = collision_rhs(mid, &overflow);
        detail::apply_step(st, r2, dt, overflow, opt);
        maybe_snapshot(st);
    }
    traj.push_back(st);
    return traj;
}

// ---------------------------------------------------------------------------
// Condensation functionals.
// ---------------------------------------------------------------------------

struct CondensationFunctionals {
    double epsilon = 0.0;
    double alpha = 0.0;
    double n_value = 0.0;      // N_alpha(g, eps)
    double a_value = 0.0;      // A_alpha(g, eps)
    double n_upper = 0.0;      // sup over delta <= eps of N_alpha(g, delta)
    double n_lower = 0.0;      // inf over delta <= eps of N_alpha(g, delta)
};

inline double n_alpha_raw(const MeasureState& st, double eps, double alpha) {
    double s = st.condensate;  // weight (1 - 0/eps)^2 = 1 at omega = 0
    for (std::size_t i = 0; i < st.omega.size(); ++i)
        if (st.omega[i] <= eps) s += st.g[i] * sqr(1.0 - st.omega[i] / eps);
    return std::pow(eps, -alpha) * s;
}

inline double a_alpha_raw(const MeasureState& st, double eps, double alpha) {
    double s = 0.0;
    for (std::size_t i = 0; i < st.omega.size(); ++i)
        if (st.omega[i] <= eps) s += st.g[i] * sqr(st.omega[i] / eps);
    return std::pow(eps, -alpha) * s;
}

inline CondensationFunctionals n_functional(const MeasureState& st, double eps, double alpha) {
    if (!(eps > 0.0)) throw precondition_error("n_functional: eps must be positive");
    CondensationFunctionals f;
    f.epsilon = eps;
    f.alpha = alpha;
    f.n_value = n_alpha_raw(st, eps, alpha);
    f.a_value = a_alpha_raw(st, eps, alpha);
    // Scan delta over a geometric grid eps * 2^{-m}; once delta drops below
    // the smallest atom the value is condensate * delta^{-alpha}, whose
    // limiting behavior (0 without condensate, +inf with one when alpha > 0)
    // is accounted for explicitly.
    f.n_upper = f.n_value;
    f.n_lower = f.n_value;
    double omega_min_carrying = -1.0;
    for (std::size_t i = 0; i < st.omega.size(); ++i)
        if (st.g[i] > 0.0) {
            omega_min_carrying = st.omega[i];
            break;
        }
    for (int m = 1; m <= 64; ++m) {
        const double delta = eps * std::pow(2.0, -m);
        const double v = n_alpha_raw(st, delta, alpha);
        f.n_upper = std::max(f.n_upper, v);
        f.n_lower = std::min(f.n_lower, v);
        if (omega_min_carrying > 0.0 && delta < omega_min_carrying && st.condensate == 0.0) {
            f.n_lower = std::min(f.n_lower, 0.0);
            break;
        }
    }
    if (st.condensate > 0.0 && alpha > 0.0)
        f.n_upper = std::numeric_limits<double>::infinity();
    if (st.condensate == 0.0) f.n_lower = std::min(f.n_lower, 0.0);
    return f;
}

// ---------------------------------------------------------------------------
// Condensation time and the amplitude-scaling experiment.
// ---------------------------------------------------------------------------

// First time the condensate reaches threshold * total_mass, linearly
// interpolated between trajectory snapshots; negative sentinel if never.
inline double condensation_time(const std::vector<MeasureState>& traj, double threshold) {
    if (traj.empty()) throw precondition_error("condensation_time: empty trajectory");
    const double target = threshold * traj.front().total_mass();
    double t_prev = traj.front().time, c_prev = traj.front().condensate;
    if (c_prev >= target) return t_prev;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double t = traj[i].time, c = traj[i].condensate;
        if (c >= target) {
            if (c == c_prev) return t;
            return t_prev + (t - t_prev) * (target - c_prev) / (c - c_prev);
        }
        t_prev = t;
        c_prev = c;
    }
    return -1.0;  // not condensed by the end of the trajectory
}

// Evolve with dense snapshots until the condensate crosses the threshold (or
// the horizon is reached); returns interpolated t*.
inline double measure_condensation_time(const MeasureState& initial, double threshold,
                                        double horizon, EvolveOptions opt = {}) {
    MeasureState st = initial;
    const double target = threshold * st.total_mass();
    double t_prev = st.time, c_prev = st.condensate;
    while (st.time < horizon) {
        const CollisionRates r1 = collision_rhs(st);
        double dt = std::min(opt.dt_max, horizon - st.time);
        const double rate = detail::max_loss_rate(st, r1);
        if (rate > 0.0) dt = std::min(dt, opt.rate_fraction / rate);
        MeasureState mid = st;
        for (std::size_t i = 0; i < st.g.size(); ++i)
            mid.g[i] = std::max(0.0, st.g[i] + 0.5 * dt * r1.atoms[i]);
        mid.condensate += 0.5 * dt * r1.condensate;
        double overflow = 0.0;
        const CollisionRates r2 = collision_rhs(mid, &overflow);
        detail::apply_step(st, r2, dt, overflow, opt);
        if (st.condensate >= target) {
            if (st.condensate == c_prev) return st.time;
            return t_prev + (st.time - t_prev) * (target - c_prev) / (st.condensate - c_prev);
        }
        t_prev = st.time;
        c_prev = st.condensate;
    }
    return -1.0;
}

struct ScalingResult {
    std::vector<double> amplitudes;
    std::vector<double> t_star;            // threshold 1e-3 (or configured)
    std::vector<double> t_star_sensitive;  // threshold 1e-4
    double slope = 0.0;                    // d log t* / d log A
    bool complete = true;                  // all amplitudes condensed
};

inline ScalingResult scaling_experiment(const std::vector<double>& amplitudes,
                                        const std::vector<double>& omega_grid,
                                        double horizon, double threshold = 1e-3,
                                        double b_cut = 1.0, EvolveOptions opt = {}) {
    if (amplitudes.size() < 4)
        throw precondition_error("scaling_experiment: need at least 4 amplitudes");
    ScalingResult res;
    res.amplitudes = amplitudes;
    for (double a : amplitudes) {
        const MeasureState st = make_rj_truncated(a, b_cut, omega_grid);
        res.t_star.push_back(measure_condensation_time(st, threshold, horizon, opt));
        res.t_star_sensitive.push_back(
            measure_condensation_time(st, 0.1 * threshold, horizon, opt));
        if (res.t_star.back() < 0.0) res.complete = false;
    }
    if (res.complete) {
        std::vector<double> la, lt;
        for (std::size_t i = 0; i < amplitudes.size(); ++i) {
            la.push_back(std::log(amplitudes[i]));
            lt.push_back(std::log(res.t_star[i]));
        }
        res.slope = fit_line(la, lt).slope;
    }
    return res;
}

// Random atomic measures for the property-test suites (deterministic seed).
inline MeasureState random_state(std::mt19937_64& rng, std::size_t max_atoms = 12) {
    std::uniform_int_distribution<std::size_t> count(2, max_atoms);
    std::uniform_real_distribution<double> logw(std::log(1e-3), std::log(1e2));
    std::uniform_real_distribution<double> mass(0.0, 1.0);
    const std::size_t n = count(rng);
    std::vector<double> w(n);
    for (auto& v : w) v = std::exp(logw(rng));
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    MeasureState st;
    st.omega = w;
    st.g.resize(st.omega.size());
    for (auto& v : st.g) v = mass(rng);
    st.seal_ledger();
    return st;
}

}  // namespace wke

#pragma once

#include <cmath>
#include <optional>

#include "liouville/circle_function.hpp"
#include "liouville/errors.hpp"
#include "liouville/operators.hpp"

namespace liouville {

// Standing assumptions at the blow-up point xi0 = 1 (theta = 0):
//   (h1)     h(1) > 0,  h'(1) = (-Delta)^{1/2} h(1) = 0
//   (nondeg) (h''(1) - (2/pi^2) Q(h)/h(1)) h''(1) + ((-Delta)^{1/2} h'(1))^2 != 0
//   (cond)   h''(1) (-Delta)^{1/2} k(1) - k'(1) (-Delta)^{1/2} h'(1) != 0
struct HypothesisReport {
    double h_at_1 = 0.0;
    double hp_at_1 = 0.0;
    double hpp_at_1 = 0.0;
    double flap_h_at_1 = 0.0;
    double flap_hp_at_1 = 0.0;
    double k_at_1 = 0.0;
    double kp_at_1 = 0.0;
    double flap_k_at_1 = 0.0;
    double q_of_h = 0.0;
    double nondeg_value = 0.0;
    double cond_value = 0.0;
    bool h1_satisfied = false;
    bool nondeg_satisfied = false;
    bool cond_satisfied = false;
    double tol = 1e-8;
};

namespace detail {

// Shared with the reduction module so det(A) and the non-degeneracy value
// come out of identical arithmetic.
inline double a11_entry(double hpp, double q, double h1) {
    return hpp - (2.0 / (std::numbers::pi * std::numbers::pi)) * q / h1;
}

inline double nondeg_expression(double hpp, double q, double h1, double flap_hp) {
    return a11_entry(hpp, q, h1) * hpp + flap_hp * flap_hp;
}

inline double cond_expression(double hpp, double flap_k, double kp, double flap_hp) {
    return hpp * flap_k - kp * flap_hp;
}

} // namespace detail

namespace detail {

// Spectral multiplier sums evaluated at theta = 0, truncated at the
// effective degree so FFT noise is not amplified by n^2.
struct PointData {
    double value = 0.0, deriv = 0.0, deriv2 = 0.0, flap = 0.0, flap_deriv = 0.0;
};

inline PointData point_data(const CircleFunction& f) {
    PointData d;
    d.value = f.coeffs()[0].real();
    const std::size_t deg = std::min(f.effective_degree(), f.n_grid() / 2 - 1);
    for (std::size_t m = 1; m <= deg; ++m) {
        const double n = static_cast<double>(m);
        const cplx c = f.coeffs()[m];
        d.value += 2.0 * c.real();
        d.deriv += -2.0 * n * c.imag();
        d.deriv2 += -2.0 * n * n * c.real();
        d.flap += 2.0 * n * c.real();
        d.flap_deriv += -2.0 * n * n * c.imag();
    }
    return d;
}

} // namespace detail

// Pointwise derivative data of h and k at theta = 0, via the spectral
// derivative and half-Laplacian multipliers. With strict=true a failed
// (h1) throws; the CLI passes strict=false to report gracefully.
inline HypothesisReport point_derivatives(const CircleFunction& h, const CircleFunction& k,
                                          double tol = 1e-8, bool strict = true) {
    HypothesisReport r;
    r.tol = tol;
    const detail::PointData dh = detail::point_data(h);
    r.h_at_1 = dh.value;
    r.hp_at_1 = dh.deriv;
    r.hpp_at_1 = dh.deriv2;
    r.flap_h_at_1 = dh.flap;
    r.flap_hp_at_1 = dh.flap_deriv;
    const detail::PointData dk = detail::point_data(k);
    r.k_at_1 = dk.value;
    r.kp_at_1 = dk.deriv;
    r.flap_k_at_1 = dk.flap;
    r.h1_satisfied = r.h_at_1 > 0.0 && std::abs(r.hp_at_1) < tol && std::abs(r.flap_h_at_1) < tol;
    if (strict && !r.h1_satisfied)
        throw error(errc::not_stationary, "h'(1) or (-Delta)^{1/2}h(1) nonzero, or h(1) <= 0");
    return r;
}

// hat h = (h - h(1)) / |z - 1|^2, with the removable value h''(1)/2 at theta = 0.
// Divergence under refinement near theta = 0 flags a violated (h1).
inline CircleFunction hat_h(const CircleFunction& h) {
    const double h1 = h.values()[0];
    const std::size_t n = h.n_grid();
    const double hpp = detail::point_data(h).deriv2;

    const double t0 = two_pi / static_cast<double>(n);
    double prev = std::abs((h.evaluate(t0) - h1) / (2.0 * (1.0 - std::cos(t0))));
    bool diverging = true;
    for (double t = t0 / 2.0; t >= t0 / 8.0; t /= 2.0) {
        const double cur = std::abs((h.evaluate(t) - h1) / (2.0 * (1.0 - std::cos(t))));
        if (cur < 1.5 * prev) diverging = false;
        prev = cur;
    }
    // bounded hat h tends to h''(1)/2 under refinement; a 1/theta pole keeps
    // doubling and dwarfs that scale
    if (diverging && prev > 50.0 * (1.0 + std::abs(hpp)))
        throw error(errc::hypothesis_h1_violated, "hat h diverges near theta = 0");

    std::vector<double> v(n);
    v[0] = 0.5 * hpp;
    for (std::size_t j = 1; j < n; ++j) {
        const double t = CircleFunction::theta_of(j, n);
        v[j] = (h.values()[j] - h1) / (2.0 * (1.0 - std::cos(t)));
    }
    return CircleFunction(std::move(v));
}

// Q(h) as int hat_h * G[hat_h] with G the log-kernel Green operator; the
// multiplier form of the defining double integral.
inline double q_form_spectral(const CircleFunction& h) {
    const CircleFunction hat = hat_h(h);
    return inner(hat, green_log(hat));
}

// Q(h) as the double integral itself: tensor trapezoid with the singular
// diagonal removed by subtracting hat_h(theta) (the kernel has zero mean,
// so the subtraction is exact and the diagonal cell contributes zero).
inline double q_form_quadrature(const CircleFunction& h) {
    const CircleFunction hat = hat_h(h);
    const std::size_t n = hat.n_grid();
    const double dtheta = two_pi / static_cast<double>(n);
    std::vector<double> kernel(n, 0.0);
    for (std::size_t m = 1; m < n; ++m)
        kernel[m] = -std::log(2.0 * std::abs(std::sin(0.5 * dtheta * static_cast<double>(m))));
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = hat.values()[i];
        double inner_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            inner_sum += kernel[(j + n - i) % n] * (hat.values()[j] - hi);
        }
        q += hi * inner_sum;
    }
    return q * dtheta * dtheta;
}

inline double check_nondeg(HypothesisReport& r) {
    r.nondeg_value = detail::nondeg_expression(r.hpp_at_1, r.q_of_h, r.h_at_1, r.flap_hp_at_1);
    r.nondeg_satisfied = std::abs(r.nondeg_value) > r.tol;
    return r.nondeg_value;
}

inline double check_transversality(HypothesisReport& r) {
    r.cond_value = detail::cond_expression(r.hpp_at_1, r.flap_k_at_1, r.kp_at_1, r.flap_hp_at_1);
    r.cond_satisfied = std::abs(r.cond_value) > r.tol;
    return r.cond_value;
}

// Full report: derivatives, Q(h), and both scalar conditions.
inline HypothesisReport hypothesis_report(const CircleFunction& h, const CircleFunction& k,
                                          double tol = 1e-8, bool strict = true) {
    HypothesisReport r = point_derivatives(h, k, tol, strict);
    if (r.h1_satisfied) {
        r.q_of_h = q_form_spectral(h);
        check_nondeg(r);
        check_transversality(r);
    }
    return r;
}

// Constant shift c with |nondeg(h + c)| >= margin, if one exists; adding c
// preserves (h1) and rescales nothing else. Inputs are never modified.
inline std::optional<double> suggest_nondeg_shift(const HypothesisReport& r, double margin = 1e-3) {
    if (std::abs(r.nondeg_value) >= margin) return 0.0;
    const double coupling = (2.0 / (std::numbers::pi * std::numbers::pi)) * r.q_of_h * r.hpp_at_1;
    if (coupling == 0.0) return std::nullopt; // nondeg does not depend on the shift
    const double base = r.hpp_at_1 * r.hpp_at_1 + r.flap_hp_at_1 * r.flap_hp_at_1;
    // nondeg(c) = base - coupling / (h(1) + c); solve nondeg(c) = +-margin and
    // return the smaller admissible shift.
    std::optional<double> best;
    for (const double sign : {1.0, -1.0}) {
        const double denom = base - sign * margin;
        if (denom == 0.0) continue;
        const double c = coupling / denom - r.h_at_1;
        if (r.h_at_1 + c > 0.0 && (!best || std::abs(c) < std::abs(*best))) best = c;
    }
    return best;
}

} // namespace liouville

#pragma once

#include <cmath>
#include <complex>

#include "liouville/circle_function.hpp"
#include "liouville/errors.hpp"

namespace liouville {

// Reduce an angle to (-pi, pi].
inline double reduce_angle(double t) {
    t = std::remainder(t, two_pi);
    if (t <= -std::numbers::pi) t += two_pi;
    return t;
}

// Parameters of the one-parameter Moebius family
//   f_{delta,xi}(z) = (z + (1-delta) xi) / (1 + (1-delta) conj(xi) z),
// xi = e^{i eta}. delta = 1 is the identity; delta -> 0 concentrates at xi.
struct MobiusParam {
    double delta = 1.0;
    double eta = 0.0;

    MobiusParam() = default;
    MobiusParam(double d, double e) : delta(d), eta(reduce_angle(e)) {
        if (!(delta > 0.0 && delta <= 1.0))
            throw std::invalid_argument("MobiusParam: delta must lie in (0, 1]");
    }

    std::complex<double> xi() const { return std::polar(1.0, eta); }
    std::complex<double> interior_point() const { return (1.0 - delta) * xi(); }
};

// |1 + (1-delta) conj(xi) z|^2 on the circle.
inline double mobius_denom_sq(const MobiusParam& p, double theta) {
    const double r = 1.0 - p.delta;
    return 1.0 + r * r + 2.0 * r * std::cos(theta - p.eta);
}

inline double mobius_map(const MobiusParam& p, double theta) {
    const std::complex<double> z = std::polar(1.0, theta);
    const std::complex<double> a = p.interior_point();
    return reduce_angle(std::arg((z + a) / (1.0 + std::conj(a) * z)));
}

inline double mobius_inverse(const MobiusParam& p, double theta) {
    const std::complex<double> w = std::polar(1.0, theta);
    const std::complex<double> a = p.interior_point();
    return reduce_angle(std::arg((w - a) / (1.0 - std::conj(a) * w)));
}

// |f'_{delta,xi}(e^{i theta})| = delta (2-delta) / |1 + (1-delta) conj(xi) z|^2.
inline double mobius_deriv_abs(const MobiusParam& p, double theta) {
    return p.delta * (2.0 - p.delta) / mobius_denom_sq(p, theta);
}

// |f'| at the preimage f^{-1}(e^{i theta}); closed form via the inverse map,
// |f'(f^{-1}(w))| = |1 - (1-delta) conj(xi) w|^2 / (delta (2-delta)).
inline double mobius_deriv_abs_at_preimage(const MobiusParam& p, double theta) {
    const double r = 1.0 - p.delta;
    const double d2 = 1.0 + r * r - 2.0 * r * std::cos(theta - p.eta);
    return d2 / (p.delta * (2.0 - p.delta));
}

// The tangential profile entering the first-order Taylor expansion of h o f.
inline double theta_fn(const MobiusParam& p, double theta) {
    return 2.0 * std::sin(theta - p.eta) / mobius_denom_sq(p, theta);
}

// Chordal distance |z + xi| (to the antipode of xi, where the pullback layer sits).
inline double dist_to_antipode(const MobiusParam& p, double theta) {
    return 2.0 * std::abs(std::cos(0.5 * (theta - p.eta)));
}

// Smallest admissible grid: the pullback has a boundary layer of width delta
// at z = -xi, so we require n_grid >= max(1024, 64/delta).
inline std::size_t grid_for_delta(double delta, std::size_t floor_grid = 1024) {
    auto need = static_cast<std::size_t>(std::ceil(64.0 / delta));
    std::size_t n = std::max<std::size_t>(floor_grid, CircleFunction::min_grid);
    while (n < need) n <<= 1;
    return n;
}

inline void check_resolution(std::size_t n_grid, double delta) {
    if (static_cast<double>(n_grid) < 64.0 / delta)
        throw error(errc::resolution_too_coarse,
                    "n_grid=" + std::to_string(n_grid) + " under 64/delta for delta=" + std::to_string(delta));
}

// Sample h(f(e^{i theta})) on the grid of h and re-expand.
inline CircleFunction pullback(const CircleFunction& h, const MobiusParam& p) {
    check_resolution(h.n_grid(), p.delta);
    std::vector<double> v(h.n_grid());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = h.evaluate(mobius_map(p, h.theta(j)));
    return CircleFunction(std::move(v));
}

inline CircleFunction log_deriv_abs(const MobiusParam& p, std::size_t n_grid) {
    const double scale = std::log(p.delta * (2.0 - p.delta));
    std::vector<double> v(n_grid);
    for (std::size_t j = 0; j < n_grid; ++j)
        v[j] = scale - std::log(mobius_denom_sq(p, CircleFunction::theta_of(j, n_grid)));
    return CircleFunction(std::move(v));
}

// Leading blow-up profile in original coordinates,
//   U(theta) = -log h1 - log |f'(f^{-1}(e^{i theta}))| + tau;
// peak height log((2-delta)/delta) - log h1 + tau at theta = eta.
inline CircleFunction bubble(const MobiusParam& p, double h1, double tau, std::size_t n_grid) {
    if (!(h1 > 0.0)) throw error(errc::nonpositive_curvature, "bubble: h1 must be positive");
    std::vector<double> v(n_grid);
    for (std::size_t j = 0; j < n_grid; ++j)
        v[j] = -std::log(h1) + tau - std::log(mobius_deriv_abs_at_preimage(p, CircleFunction::theta_of(j, n_grid)));
    return CircleFunction(std::move(v));
}

} // namespace liouville

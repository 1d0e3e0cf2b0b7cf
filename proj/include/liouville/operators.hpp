#pragma once

#include <cmath>
#include <stdexcept>

#include "liouville/circle_function.hpp"

namespace liouville {

// The non-local operators on the circle are Fourier multipliers:
//   half-Laplacian        c_n -> |n| c_n
//   log-kernel Green op   c_n -> (pi/|n|) c_n   (n != 0), mode 0 -> 0
//   tangential derivative c_n -> (i n) c_n
// All are exact on resolved modes; products are formed pointwise on the grid.

inline CircleFunction half_laplacian(const CircleFunction& f) {
    const std::size_t n = f.n_grid();
    std::vector<cplx> c = f.coeffs();
    for (std::size_t k = 0; k < n; ++k) {
        const double absn = static_cast<double>(k <= n / 2 ? k : n - k);
        c[k] *= absn;
    }
    c[0] = cplx(0.0, 0.0);
    return CircleFunction::from_coeffs(std::move(c));
}

inline CircleFunction green_log(const CircleFunction& g) {
    const std::size_t n = g.n_grid();
    std::vector<cplx> c = g.coeffs();
    c[0] = cplx(0.0, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double absn = static_cast<double>(k <= n / 2 ? k : n - k);
        c[k] *= std::numbers::pi / absn;
    }
    return CircleFunction::from_coeffs(std::move(c));
}

inline CircleFunction derivative(const CircleFunction& f) {
    const std::size_t n = f.n_grid();
    std::vector<cplx> c = f.coeffs();
    for (std::size_t k = 0; k < n; ++k) {
        const double mode = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
        c[k] *= cplx(0.0, mode);
    }
    // Nyquist mode has no well-defined odd derivative on the real grid.
    c[n / 2] = cplx(0.0, 0.0);
    return CircleFunction::from_coeffs(std::move(c));
}

// Poisson integral of f at the interior point r e^{i theta}.
inline double harmonic_extension(const CircleFunction& f, double r, double theta) {
    if (r < 0.0 || r >= 1.0) throw std::invalid_argument("harmonic_extension: need 0 <= r < 1");
    const std::size_t half = f.n_grid() / 2;
    double acc = f.coeffs()[0].real();
    const cplx rot(std::cos(theta), std::sin(theta));
    cplx e = rot;
    double rn = r;
    for (std::size_t n = 1; n < half; ++n) {
        acc += 2.0 * rn * (f.coeffs()[n] * e).real();
        e *= rot;
        rn *= r;
    }
    acc += rn * (f.coeffs()[half] * e).real();
    return acc;
}

namespace detail {

// Principal-value sum on the coarsened grid of stride s: symmetric pairs
// about the singular node, singular node skipped. For a mode of frequency
// m this rule returns the multiplier m - m^2/(N/s), so one Richardson step
// over strides {1,2} removes the defect exactly.
inline double pv_sum_strided(const CircleFunction& f, std::size_t i, std::size_t stride) {
    const std::size_t n = f.n_grid();
    const std::size_t k = n / stride;
    const double dphi = two_pi / static_cast<double>(k);
    const double fi = f.values()[i];
    double acc = 0.0;
    for (std::size_t m = 1; m < k; ++m) {
        const std::size_t j = (i + m * stride) % n;
        const double t = dphi * static_cast<double>(m);
        const double denom = 2.0 * std::sin(0.5 * t);
        acc += (fi - f.values()[j]) / (denom * denom);
    }
    return acc * dphi / std::numbers::pi;
}

} // namespace detail

// Principal-value quadrature of (1/pi) int (f(z)-f(w))/|z-w|^2 dw at the grid
// node theta_i. Independent of the multiplier path: pure real-space sums.
inline double half_laplacian_pv(const CircleFunction& f, std::size_t i) {
    if (i >= f.n_grid()) throw std::out_of_range("half_laplacian_pv: node index");
    const double fine = detail::pv_sum_strided(f, i, 1);
    const double coarse = detail::pv_sum_strided(f, i, 2);
    return 2.0 * fine - coarse;
}

inline double half_laplacian_pv_at(const CircleFunction& f, double theta) {
    const double step = two_pi / static_cast<double>(f.n_grid());
    const double pos = theta / step;
    const auto i = static_cast<std::size_t>(std::llround(pos)) % f.n_grid();
    if (std::abs(pos - std::round(pos)) > 1e-9)
        throw std::invalid_argument("half_laplacian_pv: theta must lie on the grid");
    return half_laplacian_pv(f, i);
}

} // namespace liouville

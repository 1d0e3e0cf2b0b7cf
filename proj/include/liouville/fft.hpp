#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace liouville {

using cplx = std::complex<double>;

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. Grids in this library are
// powers of two by construction, so the general-length machinery of a
// full FFT package is not needed; keeping the transform self-contained
// keeps every operation pure and safe under concurrent use.
inline void fft_inplace(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: length must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    // Twiddles from std::polar directly (no recurrence drift across a stage).
    std::vector<cplx> tw(n / 2);
    const double sgn = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n / 2; ++k)
        tw[k] = std::polar(1.0, sgn * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * tw[k * stride];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

} // namespace detail

// Forward DFT of real samples; returns coefficients c_k = (1/N) sum_j f_j e^{-i k theta_j}
// in FFT index order (k = 0..N-1, frequency n = k for k <= N/2, n = k - N above).
inline std::vector<cplx> dft_forward(const std::vector<double>& values) {
    std::vector<cplx> a(values.begin(), values.end());
    detail::fft_inplace(a, false);
    const double inv = 1.0 / static_cast<double>(a.size());
    for (auto& x : a) x *= inv;
    return a;
}

// Inverse DFT back to real samples; imaginary residue is discarded (inputs are
// conjugate-symmetric for every function handled here).
inline std::vector<double> dft_inverse(std::vector<cplx> coeffs) {
    detail::fft_inplace(coeffs, true);
    const double n = static_cast<double>(coeffs.size());
    std::vector<double> out(coeffs.size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) out[j] = coeffs[j].real() * n;
    return out;
}

} // namespace liouville

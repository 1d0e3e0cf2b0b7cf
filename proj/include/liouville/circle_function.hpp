#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "liouville/fft.hpp"

namespace liouville {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// A real 2pi-periodic function held as uniform samples of theta in [0, 2pi)
// together with the matching Fourier coefficients (FFT index order, mode n
// lives at index n for n >= 0 and at index N+n for n < 0). Immutable after
// construction; every operation on it builds a new function, so instances
// are safe to share across threads.
class CircleFunction {
  public:
    static constexpr std::size_t min_grid = 64;

    explicit CircleFunction(std::vector<double> values)
        : n_(values.size()), values_(std::move(values)) {
        check_grid(n_);
        coeffs_ = dft_forward(values_);
        symmetrize();
        effective_degree_ = compute_effective_degree();
    }

    static CircleFunction from_coeffs(std::vector<cplx> coeffs) {
        return CircleFunction(std::move(coeffs), from_coeffs_tag{});
    }

    static CircleFunction sample(std::size_t n_grid, const std::function<double(double)>& f) {
        check_grid(n_grid);
        std::vector<double> v(n_grid);
        for (std::size_t j = 0; j < n_grid; ++j) v[j] = f(theta_of(j, n_grid));
        return CircleFunction(std::move(v));
    }

    static CircleFunction constant(std::size_t n_grid, double c) {
        check_grid(n_grid);
        return CircleFunction(std::vector<double>(n_grid, c));
    }

    std::size_t n_grid() const { return n_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    double theta(std::size_t j) const { return theta_of(j, n_); }
    static double theta_of(std::size_t j, std::size_t n) {
        return two_pi * static_cast<double>(j) / static_cast<double>(n);
    }

    // Coefficient of mode n for signed n in {-N/2+1, ..., N/2}.
    cplx coeff(long n) const {
        const long half = static_cast<long>(n_) / 2;
        if (n < -half + 1 || n > half) throw std::out_of_range("coeff: mode outside grid");
        return coeffs_[static_cast<std::size_t>(n >= 0 ? n : static_cast<long>(n_) + n)];
    }

    double mean() const { return coeffs_[0].real(); }

    // Largest |n| carrying spectral mass; evaluate() sums only these modes.
    std::size_t effective_degree() const { return effective_degree_; }

    // Evaluate the trigonometric interpolant at an arbitrary angle.
    double evaluate(double theta) const {
        const std::size_t half = n_ / 2;
        const std::size_t d = effective_degree_;
        double acc = coeffs_[0].real();
        const cplx rot(std::cos(theta), std::sin(theta));
        cplx e = rot; // e^{i n theta}, n = 1, 2, ...
        for (std::size_t n = 1; n <= d && n < half; ++n) {
            acc += 2.0 * (coeffs_[n] * e).real();
            e *= rot;
        }
        if (d >= half) acc += (coeffs_[half] * e).real();
        return acc;
    }

    CircleFunction map(const std::function<double(double)>& op) const {
        std::vector<double> v(n_);
        for (std::size_t j = 0; j < n_; ++j) v[j] = op(values_[j]);
        return CircleFunction(std::move(v));
    }

  private:
    struct from_coeffs_tag {};
    CircleFunction(std::vector<cplx> coeffs, from_coeffs_tag) : n_(coeffs.size()), coeffs_(std::move(coeffs)) {
        check_grid(n_);
        symmetrize();
        values_ = dft_inverse(coeffs_);
        effective_degree_ = compute_effective_degree();
    }

    static void check_grid(std::size_t n) {
        if (n < min_grid || !detail::is_power_of_two(n))
            throw std::invalid_argument("CircleFunction: n_grid must be a power of two >= 64");
    }

    // Real-valuedness: coeffs[-n] = conj(coeffs[n]); modes 0 and N/2 real.
    void symmetrize() {
        coeffs_[0] = cplx(coeffs_[0].real(), 0.0);
        coeffs_[n_ / 2] = cplx(coeffs_[n_ / 2].real(), 0.0);
        for (std::size_t k = 1; k < n_ / 2; ++k) {
            const cplx avg = 0.5 * (coeffs_[k] + std::conj(coeffs_[n_ - k]));
            coeffs_[k] = avg;
            coeffs_[n_ - k] = std::conj(avg);
        }
    }

    std::size_t compute_effective_degree() const {
        double scale = 0.0;
        for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
        const double cut = scale > 0.0 ? scale * 1e-14 : 0.0;
        std::size_t d = 0;
        for (std::size_t n = 1; n <= n_ / 2; ++n) {
            if (std::abs(coeffs_[n]) > cut) d = n;
        }
        return d;
    }

    std::size_t n_ = 0;
    std::vector<double> values_;
    std::vector<cplx> coeffs_;
    std::size_t effective_degree_ = 0;
};

// Build a trigonometric polynomial a0 + sum a_n cos(n theta) + sum b_n sin(n theta);
// cos_coeffs[0] is the constant term, sin_coeffs[0] is ignored if present.
inline CircleFunction make_trig_poly(std::size_t n_grid, const std::vector<double>& cos_coeffs,
                                     const std::vector<double>& sin_coeffs = {}) {
    if (cos_coeffs.size() > n_grid / 8 + 1 || sin_coeffs.size() > n_grid / 8 + 1)
        throw std::invalid_argument("make_trig_poly: coefficient list longer than n_grid/8");
    return CircleFunction::sample(n_grid, [&](double t) {
        double acc = cos_coeffs.empty() ? 0.0 : cos_coeffs[0];
        for (std::size_t n = 1; n < cos_coeffs.size(); ++n) acc += cos_coeffs[n] * std::cos(double(n) * t);
        for (std::size_t n = 1; n < sin_coeffs.size(); ++n) acc += sin_coeffs[n] * std::sin(double(n) * t);
        return acc;
    });
}

// Re-sample the trigonometric interpolant on a different grid.
inline CircleFunction resample(const CircleFunction& f, std::size_t n_grid) {
    if (n_grid == f.n_grid()) return f;
    return CircleFunction::sample(n_grid, [&](double t) { return f.evaluate(t); });
}

inline CircleFunction zip(const CircleFunction& f, const CircleFunction& g,
                          const std::function<double(double, double)>& op) {
    if (f.n_grid() != g.n_grid()) throw std::invalid_argument("zip: grid mismatch");
    std::vector<double> v(f.n_grid());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = op(f.values()[j], g.values()[j]);
    return CircleFunction(std::move(v));
}

inline CircleFunction operator+(const CircleFunction& f, const CircleFunction& g) {
    return zip(f, g, [](double a, double b) { return a + b; });
}
inline CircleFunction operator-(const CircleFunction& f, const CircleFunction& g) {
    return zip(f, g, [](double a, double b) { return a - b; });
}
inline CircleFunction operator*(const CircleFunction& f, const CircleFunction& g) {
    return zip(f, g, [](double a, double b) { return a * b; });
}
inline CircleFunction operator*(double s, const CircleFunction& f) {
    return f.map([s](double x) { return s * x; });
}
inline CircleFunction operator+(const CircleFunction& f, double c) {
    return f.map([c](double x) { return x + c; });
}
inline CircleFunction operator-(const CircleFunction& f, double c) { return f + (-c); }

// Arclength integral over the circle (periodic trapezoid rule, spectrally exact).
inline double integrate(const CircleFunction& f) { return two_pi * f.mean(); }

// L2-type pairing int f g dtheta.
inline double inner(const CircleFunction& f, const CircleFunction& g) {
    if (f.n_grid() != g.n_grid()) throw std::invalid_argument("inner: grid mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < f.n_grid(); ++j) acc += f.values()[j] * g.values()[j];
    return acc * two_pi / static_cast<double>(f.n_grid());
}

struct LpNorm {
    double p = 2.0;
    double value = 0.0;
};

inline LpNorm lp_norm(const CircleFunction& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    LpNorm out;
    out.p = p;
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        out.value = m;
        return out;
    }
    double acc = 0.0;
    for (double v : f.values()) acc += std::pow(std::abs(v), p);
    out.value = std::pow(acc * two_pi / static_cast<double>(f.n_grid()), 1.0 / p);
    return out;
}

inline double sup_norm(const CircleFunction& f) { return lp_norm(f, std::numeric_limits<double>::infinity()).value; }

// H^1(D) seminorm of the harmonic extension, evaluated spectrally. The
// constant is pinned by the disk integral int_D |grad H|^2 = pi for
// f = cos(theta), which this formula reproduces.
inline double dirichlet_norm(const CircleFunction& f) {
    const std::size_t half = f.n_grid() / 2;
    double acc = 0.0;
    for (std::size_t n = 1; n < half; ++n) acc += 2.0 * static_cast<double>(n) * std::norm(f.coeffs()[n]);
    acc += static_cast<double>(half) * std::norm(f.coeffs()[half]);
    return std::sqrt(two_pi * acc);
}

} // namespace liouville

#pragma once

#include <cmath>
#include <optional>

#include "liouville/circle_function.hpp"
#include "liouville/errors.hpp"
#include "liouville/mobius.hpp"
#include "liouville/operators.hpp"

namespace liouville {

// Approximate solution V + W + tau in bubble coordinates:
//   V = -log h(xi) (constant), and
//   W = (1/pi) int log(1/|z-w|) (h(f(w)) - h(xi)) e^V dw,
// realized through the log-kernel multiplier. W solves
//   (-D)^{1/2} W = (h o f - h(xi)) e^V - (1/2pi) int (h o f - h(xi)) e^V.
struct AnsatzBundle {
    MobiusParam params;
    double tau = 0.0;
    double epsilon = 0.0;
    double h_at_xi = 1.0;
    double V = 0.0; // -log h(xi)
    CircleFunction h, k, h_pull, k_pull, W;
    double mean_W = 0.0;
};

inline AnsatzBundle build_ansatz(const CircleFunction& h, const CircleFunction& k, const MobiusParam& p,
                                 double tau, double epsilon) {
    const double hxi = h.evaluate(p.eta);
    if (!(hxi > 0.0)) throw error(errc::nonpositive_curvature, "h(xi) must be positive");
    CircleFunction hf = pullback(h, p);
    CircleFunction kf = pullback(k, p);
    CircleFunction w = (1.0 / (std::numbers::pi * hxi)) * green_log(hf - hxi);
    AnsatzBundle b{p, tau, epsilon, hxi, -std::log(hxi), h, k, std::move(hf), std::move(kf), std::move(w)};
    b.mean_W = b.W.mean();
    return b;
}

// h_eps o f = (h + eps k) o f on the bundle grid.
inline CircleFunction heps_pull(const AnsatzBundle& b) {
    if (b.epsilon == 0.0) return b.h_pull;
    return b.h_pull + b.epsilon * b.k_pull;
}

struct ResidualReport {
    CircleFunction E, E1, E2; // E = E1 + E2 + E3, E3 constant
    double E3 = 0.0;
    std::vector<LpNorm> norms;                    // p = 1, 3/2, 2, inf
    double split_norm_E1 = 0.0, split_norm_E2 = 0.0, split_norm_E3 = 0.0; // L2 of each part
};

// Error  E = (h_eps(f) e^{W+tau} - h(f)) e^V + (1/2pi) int (h(f)-h(xi)) e^V,
// split as E1 = h(f)(e^{W+tau}-1)/h(xi), E2 = eps k(f) e^{W+tau}/h(xi),
// E3 = the constant mean term.
inline ResidualReport residual_E(const AnsatzBundle& b) {
    const double inv_h = 1.0 / b.h_at_xi;
    const CircleFunction expw = b.W.map([tau = b.tau](double w) { return std::exp(w + tau); });
    CircleFunction e1 = zip(b.h_pull, expw, [inv_h](double hf, double ew) { return inv_h * hf * (ew - 1.0); });
    CircleFunction e2 = b.epsilon == 0.0
                            ? CircleFunction::constant(b.h_pull.n_grid(), 0.0)
                            : zip(b.k_pull, expw, [s = b.epsilon * inv_h](double kf, double ew) { return s * kf * ew; });
    const double e3 = integrate(b.h_pull - b.h_at_xi) * inv_h / two_pi;
    CircleFunction e = zip(e1, e2, [e3](double a, double bb) { return a + bb + e3; });

    ResidualReport r{std::move(e), std::move(e1), std::move(e2), e3, {}, 0.0, 0.0, 0.0};
    const double inf = std::numeric_limits<double>::infinity();
    for (double p : {1.0, 1.5, 2.0, inf}) r.norms.push_back(lp_norm(r.E, p));
    r.split_norm_E1 = lp_norm(r.E1, 2.0).value;
    r.split_norm_E2 = lp_norm(r.E2, 2.0).value;
    r.split_norm_E3 = std::abs(r.E3) * std::sqrt(two_pi);
    return r;
}

// Kernel generators of the linearized bubble operator,
//   Z1 = <z, xi> / (4 h(xi)^2),  Z2 = <z, xi-perp> / (4 h(xi)^2);
// mode-1 eigenfunctions of the |n| multiplier, so (-D)^{1/2} Z_i = Z_i.
inline CircleFunction kernel_Z(int i, const MobiusParam& p, const CircleFunction& h) {
    if (i != 1 && i != 2) throw std::invalid_argument("kernel_Z: i must be 1 or 2");
    const double hxi = h.evaluate(p.eta);
    if (!(hxi > 0.0)) throw error(errc::nonpositive_curvature, "h(xi) must be positive");
    const double scale = 1.0 / (4.0 * hxi * hxi);
    return CircleFunction::sample(h.n_grid(), [&, i](double t) {
        return scale * (i == 1 ? std::cos(t - p.eta) : std::sin(t - p.eta));
    });
}

// L0 phi = (-D)^{1/2} phi - h(xi) e^V phi; h(xi) e^V = 1 identically.
inline CircleFunction apply_L0(const CircleFunction& phi) { return half_laplacian(phi) - phi; }

// L phi = (h_eps(f) e^{W+tau} - h(xi)) e^V phi.
inline CircleFunction apply_L(const AnsatzBundle& b, const CircleFunction& phi) {
    const CircleFunction he = heps_pull(b);
    const double inv_h = 1.0 / b.h_at_xi;
    CircleFunction coeff = zip(he, b.W, [inv_h, tau = b.tau](double hf, double w) {
        return hf * std::exp(w + tau) * inv_h - 1.0;
    });
    return coeff * phi;
}

// N(phi) = h_eps(f) e^{V+W+tau} (e^phi - 1 - phi).
inline CircleFunction apply_N(const AnsatzBundle& b, const CircleFunction& phi) {
    const CircleFunction he = heps_pull(b);
    const double inv_h = 1.0 / b.h_at_xi;
    CircleFunction pref = zip(he, b.W, [inv_h, tau = b.tau](double hf, double w) {
        return hf * inv_h * std::exp(w + tau);
    });
    return zip(pref, phi, [](double a, double p) { return a * std::expm1(p) - a * p; });
}

struct ProjectionData {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    double int_E = 0.0, int_E_Z1 = 0.0, int_E_Z2 = 0.0;
    double norm_Z1 = 0.0, norm_Z2 = 0.0; // int h(xi) e^V Z_i^2 = pi / (16 h(xi)^4)
};

// Right sides of the c-identities: multiply the projected equation by Z_i
// (or integrate) and divide by the kernel normalization. phi = nullopt
// measures the leading order.
inline ProjectionData projections(const AnsatzBundle& b, const std::optional<CircleFunction>& phi = std::nullopt) {
    const ResidualReport rr = residual_E(b);
    const CircleFunction z1 = kernel_Z(1, b.params, b.h);
    const CircleFunction z2 = kernel_Z(2, b.params, b.h);

    ProjectionData out;
    out.norm_Z1 = inner(z1, z1);
    out.norm_Z2 = inner(z2, z2);
    out.int_E = integrate(rr.E);
    out.int_E_Z1 = inner(rr.E, z1);
    out.int_E_Z2 = inner(rr.E, z2);

    double int_rest = 0.0, int_rest_z1 = 0.0, int_rest_z2 = 0.0;
    if (phi) {
        const CircleFunction lphi = apply_L(b, *phi);
        const CircleFunction nphi = apply_N(b, *phi);
        int_rest = integrate(lphi) + integrate(nphi);
        int_rest_z1 = inner(lphi, z1) + inner(nphi, z1);
        int_rest_z2 = inner(lphi, z2) + inner(nphi, z2);
    }
    out.c0 = -(out.int_E + int_rest) / two_pi;
    out.c1 = -(out.int_E_Z1 + int_rest_z1) / out.norm_Z1;
    out.c2 = -(out.int_E_Z2 + int_rest_z2) / out.norm_Z2;
    return out;
}

} // namespace liouville

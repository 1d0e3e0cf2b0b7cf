#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "liouville/ansatz.hpp"
#include "liouville/circle_function.hpp"
#include "liouville/errors.hpp"
#include "liouville/fitting.hpp"
#include "liouville/mobius.hpp"
#include "liouville/operators.hpp"
#include "liouville/reduction.hpp"

namespace liouville {

struct SolveRecord {
    double epsilon = 0.0;
    CircleFunction u;
    MobiusParam fitted;
    double tau_fit = 0.0;
    double fit_residual = 0.0;
    int newton_iters = 0;
    double final_residual_inf = 0.0;
    double mass = 0.0; // int h_eps e^u dtheta, pinned to 2pi by the zero mode
    double jacobian_condition = 0.0;
};

struct ContinuationTrace {
    std::vector<SolveRecord> records; // by decreasing |eps|
    double rate_d = 0.0;              // slope of fitted delta vs eps
    double rate_s = 0.0;              // slope of fitted eta vs eps
};

namespace detail {

// Real-space kernel row of the |n| multiplier; Lambda_{jl} = row[(j-l) mod N].
inline std::vector<double> half_laplacian_kernel_row(std::size_t n) {
    std::vector<cplx> c(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double absn = static_cast<double>(k <= n / 2 ? k : n - k);
        c[k] = cplx(absn / static_cast<double>(n), 0.0);
    }
    return dft_inverse(std::move(c));
}

} // namespace detail

// Damped Newton on R(u) = (-D)^{1/2} u - (h_eps e^u - 1) over Fourier
// collocation values. The Jacobian is the dense circulant of the |n|
// multiplier minus the diagonal h_eps e^u; solved by partial-pivot LU.
inline SolveRecord newton_solve(const CircleFunction& h_eps, const CircleFunction& u0, double tol = 1e-10,
                                int max_iters = 40) {
    if (h_eps.n_grid() != u0.n_grid()) throw std::invalid_argument("newton_solve: grid mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("newton_solve: tol must be positive");
    const std::size_t n = u0.n_grid();
    const auto ni = static_cast<Eigen::Index>(n);
    const std::vector<double> row = detail::half_laplacian_kernel_row(n);

    CircleFunction u = u0;
    auto residual = [&](const CircleFunction& v) {
        return zip(half_laplacian(v), zip(h_eps, v, [](double h, double x) { return h * std::exp(x) - 1.0; }),
                   [](double a, double b) { return a - b; });
    };
    CircleFunction res = residual(u);
    double res_inf = sup_norm(res);

    Eigen::MatrixXd jac(ni, ni);
    double condition = 0.0;
    int iter = 0;
    for (; iter < max_iters && res_inf > tol; ++iter) {
        for (Eigen::Index j = 0; j < ni; ++j)
            for (Eigen::Index l = 0; l < ni; ++l)
                jac(j, l) = row[static_cast<std::size_t>((j - l + ni) % ni)];
        for (Eigen::Index j = 0; j < ni; ++j)
            jac(j, j) -= h_eps.values()[static_cast<std::size_t>(j)] * std::exp(u.values()[static_cast<std::size_t>(j)]);

        Eigen::VectorXd rhs(ni);
        for (Eigen::Index j = 0; j < ni; ++j) rhs(j) = -res.values()[static_cast<std::size_t>(j)];
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        const double rcond = lu.rcond();
        if (!(rcond > 1e-15)) throw error(errc::singular_jacobian, "rcond = " + std::to_string(rcond));
        condition = 1.0 / rcond;
        Eigen::VectorXd step = lu.solve(rhs);
        if (!step.allFinite()) throw error(errc::singular_jacobian, "non-finite Newton step");

        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving) {
            std::vector<double> trial(n);
            for (std::size_t j = 0; j < n; ++j) trial[j] = u.values()[j] + lambda * step(static_cast<Eigen::Index>(j));
            CircleFunction unew(std::move(trial));
            CircleFunction rnew = residual(unew);
            const double rnew_inf = sup_norm(rnew);
            if (rnew_inf < res_inf) {
                u = std::move(unew);
                res = std::move(rnew);
                res_inf = rnew_inf;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) throw error(errc::no_convergence, "backtracking stalled at residual " + std::to_string(res_inf));
    }
    if (res_inf > tol) throw error(errc::no_convergence, "residual " + std::to_string(res_inf) + " after max_iters");

    SolveRecord rec{0.0, u, MobiusParam(), 0.0, 0.0, iter, res_inf, 0.0, condition};
    rec.mass = integrate(zip(h_eps, u, [](double h, double x) { return h * std::exp(x); }));
    return rec;
}

namespace detail {

// Gauss-Newton core for the bubble profile
//   U(theta; delta, eta, tau) = -log h1 + tau - log |f'(f^{-1}(e^{i theta}))|,
// minimizing sum_j w_j (u_j - U_j)^2. With weighted = true the weight is the
// family's intrinsic measure w = |(f^{-1})'| = delta(2-delta)/D, which turns
// the functional into the L2 misfit of the profile in bubble coordinates;
// weighted = false is the plain grid L2.
inline std::tuple<MobiusParam, double, double> fit_bubble_core(const CircleFunction& u, double h1, bool weighted) {
    if (!(h1 > 0.0)) throw error(errc::nonpositive_curvature, "fit_bubble: h1 must be positive");
    const std::size_t n = u.n_grid();
    const double dtheta = two_pi / static_cast<double>(n);

    std::size_t argmax = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (u.values()[j] > u.values()[argmax]) argmax = j;
    double eta = reduce_angle(u.theta(argmax));
    double delta = std::clamp(2.0 * std::exp(-u.values()[argmax]) / h1, 1e-8, 1.0);
    double tau = 0.0;

    auto model = [&](double d, double e, double t, std::size_t j) {
        const double r = 1.0 - d;
        const double dd = 1.0 + r * r - 2.0 * r * std::cos(u.theta(j) - e);
        return -std::log(h1) + t + std::log(d * (2.0 - d)) - std::log(dd);
    };
    auto objective = [&](double d, double e, double t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double res = u.values()[j] - model(d, e, t, j);
            double w = 1.0;
            if (weighted) {
                const double r = 1.0 - d;
                w = d * (2.0 - d) / (1.0 + r * r - 2.0 * r * std::cos(u.theta(j) - e));
            }
            acc += w * res * res;
        }
        return std::sqrt(acc * dtheta);
    };

    double best = objective(delta, eta, tau);
    const double initial = best;
    bool improved_ever = false;
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
        Eigen::Vector3d atr = Eigen::Vector3d::Zero();
        const double r = 1.0 - delta;
        const double lead = delta * (2.0 - delta);
        const double dlead = 2.0 - 2.0 * delta;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = std::cos(u.theta(j) - eta);
            const double s = std::sin(u.theta(j) - eta);
            const double dd = 1.0 + r * r - 2.0 * r * c;
            const double dD_ddelta = 2.0 * c - 2.0 * r; // d/d(delta) of dd, with dr = -1
            const double dD_deta = -2.0 * r * s;
            Eigen::Vector3d g; // dU/d(delta, eta, tau)
            g(0) = dlead / lead - dD_ddelta / dd;
            g(1) = -dD_deta / dd;
            g(2) = 1.0;
            const double res = u.values()[j] - model(delta, eta, tau, j);
            if (weighted) {
                // s_j = sqrt(w_j) res_j with w = lead/dd.
                const double sw = std::sqrt(lead / dd);
                Eigen::Vector3d dsw; // d sqrt(w)
                dsw(0) = 0.5 * sw * (dlead / lead - dD_ddelta / dd);
                dsw(1) = 0.5 * sw * (-dD_deta / dd);
                dsw(2) = 0.0;
                Eigen::Vector3d js = sw * (-g) + res * dsw; // d s_j / d params
                ata += js * js.transpose();
                atr -= js * (sw * res);
            } else {
                ata += g * g.transpose();
                atr += g * res;
            }
        }
        ata.diagonal().array() += 1e-14 * ata.trace();
        Eigen::Vector3d step = ata.ldlt().solve(atr);
        if (!step.allFinite()) throw error(errc::fit_diverged, "non-finite Gauss-Newton step");

        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 25; ++halving) {
            const double d_try = std::clamp(delta + lambda * step(0), 1e-8, 1.0);
            const double e_try = reduce_angle(eta + lambda * step(1));
            const double t_try = tau + lambda * step(2);
            const double r_try = objective(d_try, e_try, t_try);
            if (r_try < best) {
                delta = d_try;
                eta = e_try;
                tau = t_try;
                best = r_try;
                accepted = true;
                improved_ever = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
        if (step.norm() < 1e-13 * (1.0 + std::abs(delta) + std::abs(eta) + std::abs(tau))) break;
    }
    if (!improved_ever && initial > 1e-12 && delta < 1.0 - 1e-9)
        throw error(errc::fit_diverged, "Gauss-Newton failed to reduce the residual");

    // Reported misfit: plain L2 of u - bubble at the minimizer.
    double l2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double res = u.values()[j] - model(delta, eta, tau, j);
        l2 += res * res;
    }
    return {MobiusParam(delta, eta), tau, std::sqrt(l2 * dtheta)};
}

} // namespace detail

// Nonlinear least squares of u against the bubble profile over (delta, eta,
// tau), under the bubble family's intrinsic weight (see fit_bubble_core).
// Initialized from the peak location and the height relation
// delta0 = 2 e^{-max u}/h1; returns the minimizer and the plain L2 misfit.
inline std::tuple<MobiusParam, double, double> fit_bubble(const CircleFunction& u, double h1) {
    return detail::fit_bubble_core(u, h1, true);
}

struct ProjectedSolution {
    CircleFunction phi;
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    int iterations = 0;
};

namespace detail {

// Constrained inverse of L0 = (-D)^{1/2} - 1 with the three Lagrange
// columns (constants, Z1, Z2): diagonal in Fourier space. Mode 0 fixes c0,
// the two mode-1 components fix (c1, c2), remaining modes divide by |n|-1;
// phi gets zero mean and zero mode-1 components, i.e. the orthogonality
// constraints hold exactly.
inline ProjectedSolution solve_L0_constrained(const AnsatzBundle& b, const CircleFunction& rhs) {
    const std::size_t n = rhs.n_grid();
    std::vector<cplx> c = rhs.coeffs();
    ProjectedSolution out{CircleFunction::constant(n, 0.0), 0.0, 0.0, 0.0, 0};

    out.c0 = -c[0].real();
    const double h2 = b.h_at_xi * b.h_at_xi;
    const cplx a = -8.0 * h2 * std::polar(1.0, b.params.eta) * c[1];
    out.c1 = a.real();
    out.c2 = -a.imag();

    std::vector<cplx> phi(n, cplx(0.0, 0.0));
    for (std::size_t k = 2; k <= n / 2; ++k) {
        const double mult = static_cast<double>(k) - 1.0;
        phi[k] = c[k] / mult;
        if (k < n / 2) phi[n - k] = c[n - k] / mult;
    }
    out.phi = CircleFunction::from_coeffs(std::move(phi));
    return out;
}

} // namespace detail

// Projected linear problem L0 phi = E + L phi + N(phi) + c0 + c1 Z1 + c2 Z2
// under int phi = int phi Z_i = 0, iterated with the nonlinearity by plain
// fixed point until the H-norm increment drops under tol.
inline ProjectedSolution solve_projected(const AnsatzBundle& b, double tol = 1e-12, int max_iters = 20) {
    const ResidualReport rr = residual_E(b);
    ProjectedSolution sol{CircleFunction::constant(rr.E.n_grid(), 0.0), 0.0, 0.0, 0.0, 0};
    for (int iter = 1; iter <= max_iters; ++iter) {
        CircleFunction rhs = rr.E + apply_L(b, sol.phi) + apply_N(b, sol.phi);
        ProjectedSolution next = detail::solve_L0_constrained(b, rhs);
        next.iterations = iter;
        const double change = dirichlet_norm(next.phi - sol.phi);
        sol = std::move(next);
        if (change <= tol) return sol;
    }
    throw error(errc::fixed_point_diverged, "no contraction after " + std::to_string(max_iters) + " iterations");
}

struct ContinuationOptions {
    std::size_t n_grid = 0; // 0 = choose from the smallest predicted delta
    double newton_tol = 1e-10;
    int max_newton_iters = 40;
    int bisect_after = 12; // bisect the eps step past this many iterations
    int max_bisections = 6;
};

namespace detail {

inline CircleFunction compose_with_inverse(const CircleFunction& w, const MobiusParam& p, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = w.evaluate(mobius_inverse(p, CircleFunction::theta_of(j, n)));
    return CircleFunction(std::move(v));
}

} // namespace detail

// L2 misfit of the blow-up profile in bubble coordinates:
//   || u(f(z)) + log|f'(z)| + log h1 - tau ||_L2.
inline double profile_misfit(const SolveRecord& rec, double h1) {
    const std::size_t n = rec.u.n_grid();
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = CircleFunction::theta_of(j, n);
        v[j] = rec.u.evaluate(mobius_map(rec.fitted, t)) + std::log(mobius_deriv_abs(rec.fitted, t)) +
               std::log(h1) - rec.tau_fit;
    }
    return lp_norm(CircleFunction(std::move(v)), 2.0).value;
}

// Follow the solution family over eps_list (decreasing |eps| on the
// admissible branch). First step starts from the ansatz pushed to original
// coordinates; later steps swap the bubble core of the previous solution
// for the newly predicted one.
inline ContinuationTrace continuation(const CircleFunction& h, const CircleFunction& k, const ReducedSystem& rs,
                                      const HypothesisReport& r, const std::vector<double>& eps_list,
                                      const ContinuationOptions& opts = {}) {
    if (eps_list.empty()) throw std::invalid_argument("continuation: empty eps_list");
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(std::abs(eps_list[i]) > std::abs(eps_list[i + 1])))
            throw std::invalid_argument("continuation: |eps| must be strictly decreasing");

    double min_delta = 1.0;
    for (double e : eps_list) {
        const auto [p, tau0] = predict_params(rs, e); // throws WRONG_BRANCH off the branch
        min_delta = std::min(min_delta, p.delta);
        (void)tau0;
    }
    const std::size_t n = opts.n_grid ? opts.n_grid : grid_for_delta(min_delta, 1024);
    const CircleFunction hg = resample(h, n);
    const CircleFunction kg = resample(k, n);
    const double h1 = hg.values()[0];

    ContinuationTrace trace;
    std::optional<SolveRecord> last;

    auto bubble_at = [&](const MobiusParam& p, double tau) { return bubble(p, hg.evaluate(p.eta), tau, n); };

    auto solve_at = [&](double eps, const CircleFunction& u0, int iter_cap) {
        const CircleFunction he = hg + eps * kg;
        SolveRecord rec = newton_solve(he, u0, opts.newton_tol, iter_cap);
        rec.epsilon = eps;
        auto [fitted, tau_fit, fit_res] = fit_bubble(rec.u, h1);
        rec.fitted = fitted;
        rec.tau_fit = tau_fit;
        rec.fit_residual = fit_res;
        return rec;
    };

    auto initial_guess = [&](double eps) {
        if (!last) {
            const auto [p, tau0] = predict_params(rs, eps);
            const AnsatzBundle b = build_ansatz(hg, kg, p, tau0, eps);
            return bubble_at(p, tau0) + detail::compose_with_inverse(b.W, p, n);
        }
        const auto [p, tau0] = predict_params(rs, eps);
        (void)tau0;
        return last->u + (bubble_at(p, last->tau_fit) - bubble_at(last->fitted, last->tau_fit));
    };

    // Solve at eps, bisecting the eps step from the previously solved value
    // when Newton needs more than bisect_after iterations. The intermediate
    // solves only warm-start the chain; they are not recorded.
    auto solve_with_bisection = [&](double eps) {
        int bisections = 0;
        while (true) {
            try {
                return solve_at(eps, initial_guess(eps), opts.bisect_after);
            } catch (const error& e) {
                const bool can_bisect = last && e.code() == errc::no_convergence && bisections < opts.max_bisections;
                if (!can_bisect) throw error(e.code(), std::string(e.what()) + " at eps = " + std::to_string(eps));
            }
            ++bisections;
            const double mid = 0.5 * (last->epsilon + eps);
            try {
                last = solve_at(mid, initial_guess(mid), opts.max_newton_iters);
            } catch (const error& e) {
                throw error(e.code(), std::string(e.what()) + " at eps = " + std::to_string(mid));
            }
        }
    };

    for (double eps : eps_list) {
        SolveRecord rec = solve_with_bisection(eps);
        last = rec;
        trace.records.push_back(std::move(rec));
    }

    std::vector<double> es, ds, ss;
    for (const auto& rec : trace.records) {
        es.push_back(rec.epsilon);
        ds.push_back(rec.fitted.delta);
        ss.push_back(rec.fitted.eta);
    }
    trace.rate_d = slope_through_origin(es, ds);
    trace.rate_s = slope_through_origin(es, ss);
    return trace;
}

} // namespace liouville

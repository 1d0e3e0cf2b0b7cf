#pragma once

#include <cmath>
#include <string>

#include "liouville/errors.hpp"
#include "liouville/hypothesis.hpp"
#include "liouville/mobius.hpp"

namespace liouville {

enum class Branch { positive_eps, negative_eps };

inline const char* branch_name(Branch b) { return b == Branch::positive_eps ? "positive-eps" : "negative-eps"; }

// The 2x2 system A (d, s)^T + B = 0 whose root gives the blow-up rates
// delta = d0 eps, eta = s0 eps:
//   A = [ h''(1) - 2Q(h)/(pi^2 h(1))   (-D)^{1/2} h'(1) ]
//       [ -(-D)^{1/2} h'(1)            h''(1)           ]
//   B = ( (-D)^{1/2} k(1), k'(1) ).
struct ReducedSystem {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
    double b1 = 0.0, b2 = 0.0;
    double det_A = 0.0;
    double d0 = 0.0, s0 = 0.0;
    Branch branch = Branch::positive_eps;
};

inline ReducedSystem assemble_reduced(const HypothesisReport& r, double tol = 1e-10) {
    ReducedSystem s;
    s.a11 = detail::a11_entry(r.hpp_at_1, r.q_of_h, r.h_at_1);
    s.a12 = r.flap_hp_at_1;
    s.a21 = -r.flap_hp_at_1;
    s.a22 = r.hpp_at_1;
    s.b1 = r.flap_k_at_1;
    s.b2 = r.kp_at_1;
    s.det_A = s.a11 * s.a22 - s.a21 * s.a12; // identical arithmetic to nondeg_value
    const double scale = std::max({std::abs(s.a11), std::abs(s.a12), std::abs(s.a21), std::abs(s.a22)});
    if (scale == 0.0 || std::abs(s.det_A) < tol * scale * scale)
        throw error(errc::degenerate, "det A = " + std::to_string(s.det_A) + " (nondeg fails)");
    return s;
}

inline std::pair<double, double> solve_reduced(ReducedSystem& s, bool cond_satisfied = true) {
    // Cramer on the exact 2x2.
    s.d0 = (-s.b1 * s.a22 + s.b2 * s.a12) / s.det_A;
    s.s0 = (-s.a11 * s.b2 + s.a21 * s.b1) / s.det_A;
    if (s.d0 == 0.0 && cond_satisfied)
        throw error(errc::tangential, "d0 = 0 although transversality was claimed");
    s.branch = s.d0 > 0.0 ? Branch::positive_eps : Branch::negative_eps;
    return {s.d0, s.s0};
}

// Leading-order parameters for a given eps on the admissible branch;
// tau starts at 0 (tau_eps = o(eps), refined later by fitting).
inline std::pair<MobiusParam, double> predict_params(const ReducedSystem& s, double epsilon) {
    const double delta = s.d0 * epsilon;
    if (!(delta > 0.0))
        throw error(errc::wrong_branch,
                    "d0*eps = " + std::to_string(delta) + " <= 0; admissible branch is " + branch_name(s.branch));
    return {MobiusParam(delta, s.s0 * epsilon), 0.0};
}

} // namespace liouville

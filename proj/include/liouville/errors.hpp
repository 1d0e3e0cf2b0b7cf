#pragma once

#include <stdexcept>
#include <string>

namespace liouville {

// Failure classes surfaced by the library. The CLI maps these onto exit
// codes: hypothesis/branch violations -> 2, solver failures -> 3.
enum class errc {
    resolution_too_coarse,
    not_stationary,
    hypothesis_h1_violated,
    nonpositive_curvature,
    degenerate,
    tangential,
    wrong_branch,
    no_convergence,
    singular_jacobian,
    fit_diverged,
    fixed_point_diverged,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::resolution_too_coarse: return "RESOLUTION_TOO_COARSE";
        case errc::not_stationary: return "NOT_STATIONARY";
        case errc::hypothesis_h1_violated: return "HYPOTHESIS_H1_VIOLATED";
        case errc::nonpositive_curvature: return "NONPOSITIVE_CURVATURE";
        case errc::degenerate: return "DEGENERATE";
        case errc::tangential: return "TANGENTIAL";
        case errc::wrong_branch: return "WRONG_BRANCH";
        case errc::no_convergence: return "NO_CONVERGENCE";
        case errc::singular_jacobian: return "SINGULAR_JACOBIAN";
        case errc::fit_diverged: return "FIT_DIVERGED";
        case errc::fixed_point_diverged: return "FIXED_POINT_DIVERGED";
    }
    return "UNKNOWN";
}

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

} // namespace liouville

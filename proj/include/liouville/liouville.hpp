#pragma once

// Spectral toolkit for the non-local Liouville equation
//   (-Delta)^{1/2} u = h_eps e^u - 1  on the unit circle:
// Fourier representation and non-local operators, the Moebius bubble family,
// standing-hypothesis checks, the V + W + tau ansatz with its residual and
// kernel projections, the reduced 2x2 rate system, and a Newton continuation
// solver that follows the blow-up branch.

#include "liouville/ansatz.hpp"
#include "liouville/circle_function.hpp"
#include "liouville/errors.hpp"
#include "liouville/fft.hpp"
#include "liouville/fitting.hpp"
#include "liouville/hypothesis.hpp"
#include "liouville/mobius.hpp"
#include "liouville/operators.hpp"
#include "liouville/reduction.hpp"
#include "liouville/scenario.hpp"
#include "liouville/solver.hpp"

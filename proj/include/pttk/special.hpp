#pragma once

namespace pttk {

/// Modified Bessel function of the second kind K_nu(x) for real order.
///
/// Temme's series for x <= 2 and the Thompson-Barnett continued fraction for
/// x > 2, followed by upward recurrence in the order; K_{-nu} = K_{nu}.
/// Accuracy target: 1e-10 relative on nu in [0.5, 3], x in (0, 50], validated
/// against the half-integer closed forms in the test suite.
///
/// Throws std::domain_error for x <= 0. Returns 0 when exp(-x) underflows.
double bessel_k(double nu, double x);

} // namespace pttk

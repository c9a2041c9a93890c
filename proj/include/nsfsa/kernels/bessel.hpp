#ifndef NSFSA_KERNELS_BESSEL_HPP
#define NSFSA_KERNELS_BESSEL_HPP

namespace nsfsa {

/// Modified Bessel function of the second kind, K_order(x).
///
/// Accurate to about 1e-14 relative for order in (0, 2.5] (larger orders are
/// reached by forward recurrence and remain accurate). Returns 0 for x > 700.
/// Throws DomainError for non-positive or non-finite arguments.
double bessel_k(double order, double x);

/// Exponentially scaled variant exp(x) * K_order(x); no underflow cutoff.
double bessel_k_scaled(double order, double x);

}  // namespace nsfsa

#endif  // NSFSA_KERNELS_BESSEL_HPP

#include "nsfsa/kernels/bessel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "nsfsa/common.hpp"

namespace nsfsa {
namespace {

constexpr double kEps = 1e-16;
constexpr double kSeriesCutoff = 2.0;
constexpr int kMaxIter = 10000;

// Taylor coefficients of 1/Gamma(z) = sum_{k>=1} c_k z^k (Abramowitz & Stegun
// 6.1.34). Index 0 holds c_1.
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

// Temme's auxiliary gamma quantities for |mu| <= 1/2:
//   gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu),  gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
//   gampl = 1/G(1+mu),  gammi = 1/G(1-mu)
struct TemmeGammas {
  double gam1, gam2, gampl, gammi;
};

TemmeGammas temme_gammas(double mu) {
  // 1/G(1+mu) = sum_k c_k mu^(k-1): split into even and odd powers of mu.
  double even = 0.0;  // sum over c_1, c_3, ... of c mu^(k-1)
  double odd = 0.0;   // sum over c_2, c_4, ... of c mu^(k-2)
  const double mu2 = mu * mu;
  for (int k = static_cast<int>(kRecipGamma.size()) - 1; k >= 0; --k) {
    // k is the zero-based index, so the coefficient is c_{k+1}.
    if (k % 2 == 0) {
      even = even * mu2 + kRecipGamma[k];
    } else {
      odd = odd * mu2 + kRecipGamma[k];
    }
  }
  TemmeGammas g;
  g.gampl = even + mu * odd;
  g.gammi = even - mu * odd;
  g.gam1 = -odd;
  g.gam2 = even;
  return g;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, both scaled by exp(x) when
// `scaled` is set.
struct KPair {
  double k_mu, k_mu1;
};

KPair temme_series(double mu, double x, bool scaled) {
  const double x2 = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
    c *= d / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * ff;
    sum += del;
    const double del1 = c * (p - i * ff);
    sum1 += del1;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  if (i > kMaxIter) throw NumericalError("bessel_k: series failed to converge");
  KPair out{sum, sum1 * 2.0 / x};
  if (scaled) {
    const double ex = std::exp(x);
    out.k_mu *= ex;
    out.k_mu1 *= ex;
  }
  return out;
}

// Steed's continued fraction (Temme's CF2) for x >= 2; always scaled.
KPair steed_cf2(double mu, double x) {
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxIter) throw NumericalError("bessel_k: continued fraction failed to converge");
  h = a1 * h;
  const double k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
  return {k_mu, k_mu1};
}

double bessel_k_impl(double order, double x, bool scaled) {
  if (!std::isfinite(order) || !std::isfinite(x) || order <= 0.0 || x <= 0.0) {
    throw DomainError("bessel_k: order and argument must be finite and positive (order=" +
                      std::to_string(order) + ", x=" + std::to_string(x) + ")");
  }
  const int nl = static_cast<int>(order + 0.5);
  const double mu = order - nl;
  KPair k = x < kSeriesCutoff ? temme_series(mu, x, scaled) : steed_cf2(mu, x);
  if (x >= kSeriesCutoff && !scaled) {
    const double ex = std::exp(-x);
    k.k_mu *= ex;
    k.k_mu1 *= ex;
  }
  // Upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m is stable for K.
  double k_lo = k.k_mu;
  double k_hi = k.k_mu1;
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * (2.0 / x) * k_hi + k_lo;
    k_lo = k_hi;
    k_hi = next;
  }
  return k_lo;
}

}  // namespace

double bessel_k(double order, double x) {
  if (x > 700.0 && std::isfinite(x) && order > 0.0 && std::isfinite(order)) return 0.0;
  return bessel_k_impl(order, x, false);
}

double bessel_k_scaled(double order, double x) { return bessel_k_impl(order, x, true); }

}  // namespace nsfsa

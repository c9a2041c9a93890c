#include "nsfsa/kernels/taper.hpp"

#include <cmath>
#include <numbers>

#include "nsfsa/common.hpp"

namespace nsfsa {

double kanter_taper(double x) {
  if (!(x >= 0.0)) throw DomainError("kanter_taper: argument must be non-negative");
  if (x == 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  constexpr double pi = std::numbers::pi;
  const double two_pi_x = 2.0 * pi * x;
  // 1 - cos(2 pi x) = 2 sin^2(pi x) avoids cancellation near zero.
  const double s = std::sin(pi * x);
  return (1.0 - x) * std::sin(two_pi_x) / two_pi_x + s * s / (pi * pi * x);
}

double TaperSpec::operator()(double lag) const {
  if (!(length > 0.0)) throw DomainError("taper length must be positive");
  switch (family) {
    case TaperFamily::kanter:
      return kanter_taper(lag / length);
  }
  return 0.0;
}

}  // namespace nsfsa

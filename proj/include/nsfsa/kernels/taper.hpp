#ifndef NSFSA_KERNELS_TAPER_HPP
#define NSFSA_KERNELS_TAPER_HPP

namespace nsfsa {

/// Kanter's compactly supported correlation on [0, 1]; zero for x >= 1.
double kanter_taper(double x);

enum class TaperFamily { kanter };

/// Taper T(|h| / length). Entries vanish for lags at or beyond `length`.
struct TaperSpec {
  double length = 1.0;
  TaperFamily family = TaperFamily::kanter;

  double operator()(double lag) const;
};

}  // namespace nsfsa

#endif  // NSFSA_KERNELS_TAPER_HPP

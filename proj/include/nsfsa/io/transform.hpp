#ifndef NSFSA_IO_TRANSFORM_HPP
#define NSFSA_IO_TRANSFORM_HPP

namespace nsfsa {

constexpr double kDefaultTransformShift = 160.0;

/// log(tc + shift); throws ConfigError when tc + shift <= 0.
double shift_log_transform(double tc, double shift = kDefaultTransformShift);
/// exp(y) - shift.
double inverse_shift_log(double y, double shift = kDefaultTransformShift);

}  // namespace nsfsa

#endif  // NSFSA_IO_TRANSFORM_HPP

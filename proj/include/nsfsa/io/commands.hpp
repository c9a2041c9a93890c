#ifndef NSFSA_IO_COMMANDS_HPP
#define NSFSA_IO_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nsfsa/common.hpp"

namespace nsfsa {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

/// Entry point of the command-line tool; `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Synthetic 2-D dataset shaped like a soil survey: positive measurements
/// whose shifted log has a linear trend in the coordinates plus an
/// anisotropic, smoothly rotating Matern field. Rows inside the held-out
/// rectangle form the test set.
struct SoilLikeData {
  LocationList locs;
  Eigen::VectorXd tc;
  std::vector<bool> held_out;
  Location holdout_lo;
  Location holdout_hi;
};

SoilLikeData make_soil_like(int n, std::uint64_t seed);

}  // namespace nsfsa

#endif  // NSFSA_IO_COMMANDS_HPP

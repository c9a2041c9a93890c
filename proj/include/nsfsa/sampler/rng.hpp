#ifndef NSFSA_SAMPLER_RNG_HPP
#define NSFSA_SAMPLER_RNG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace nsfsa {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for sub-stream `stream` of a parent seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// Per-chain random stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  double uniform() { return unif_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unif_(engine_); }
  double normal() { return norm_(engine_); }
  /// Uniform integer in [0, n).
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }
  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = normal();
    return out;
  }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace nsfsa

#endif  // NSFSA_SAMPLER_RNG_HPP

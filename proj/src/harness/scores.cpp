#include "nsfsa/harness/scores.hpp"

#include "nsfsa/common.hpp"

namespace nsfsa {
namespace {

void check_group(const std::vector<int>& group, Eigen::Index n) {
  if (group.empty()) throw DomainError("score over an empty location group");
  for (int i : group) {
    if (i < 0 || i >= n) throw DomainError("score group index out of range");
  }
}

}  // namespace

double mspe(const Eigen::VectorXd& pred_mean, const Eigen::VectorXd& truth, const std::vector<int>& group) {
  if (pred_mean.size() != truth.size()) throw DomainError("mspe: length mismatch");
  check_group(group, truth.size());
  double acc = 0.0;
  for (int i : group) {
    const double d = pred_mean(i) - truth(i);
    acc += d * d;
  }
  return acc / static_cast<double>(group.size());
}

double mspe(const Eigen::VectorXd& pred_mean, const Eigen::VectorXd& truth) {
  std::vector<int> all(static_cast<std::size_t>(truth.size()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return mspe(pred_mean, truth, all);
}

double interval_score(double lower, double upper, double x, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("interval_score: alpha must lie in (0, 1)");
  if (lower > upper) throw DomainError("interval_score: lower bound exceeds upper bound");
  double s = upper - lower;
  if (x < lower) s += 2.0 / alpha * (lower - x);
  if (x > upper) s += 2.0 / alpha * (x - upper);
  return s;
}

double interval_score(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, const Eigen::VectorXd& truth,
                      const std::vector<int>& group, double alpha) {
  if (lower.size() != truth.size() || upper.size() != truth.size()) throw DomainError("interval_score: length mismatch");
  check_group(group, truth.size());
  double acc = 0.0;
  for (int i : group) acc += interval_score(lower(i), upper(i), truth(i), alpha);
  return acc / static_cast<double>(group.size());
}

double coverage(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, const Eigen::VectorXd& truth,
                const std::vector<int>& group) {
  check_group(group, truth.size());
  int hit = 0;
  for (int i : group) hit += (truth(i) >= lower(i) && truth(i) <= upper(i)) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(group.size());
}

}  // namespace nsfsa

#ifndef NSFSA_HARNESS_SCORES_HPP
#define NSFSA_HARNESS_SCORES_HPP

#include <vector>

#include <Eigen/Core>

namespace nsfsa {

/// Mean squared difference over the indices in `group`.
double mspe(const Eigen::VectorXd& pred_mean, const Eigen::VectorXd& truth, const std::vector<int>& group);
double mspe(const Eigen::VectorXd& pred_mean, const Eigen::VectorXd& truth);

/// Interval score of the central (1 - alpha) interval [lower, upper] at x.
double interval_score(double lower, double upper, double x, double alpha = 0.05);
/// Group average of the interval score.
double interval_score(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, const Eigen::VectorXd& truth,
                      const std::vector<int>& group, double alpha = 0.05);

/// Empirical coverage of [lower, upper] over the group.
double coverage(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, const Eigen::VectorXd& truth,
                const std::vector<int>& group);

}  // namespace nsfsa

#endif  // NSFSA_HARNESS_SCORES_HPP

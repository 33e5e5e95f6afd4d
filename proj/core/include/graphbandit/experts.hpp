#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "graphbandit/environment.hpp"

namespace graphbandit {

/// Regression data with targets scaled to [0, 1]. Rows [0, train_rows) form
/// the training prefix; the rest is the online stream.
struct Dataset {
  Eigen::MatrixXd features;  // N x d
  std::vector<double> targets;
  std::size_t train_rows = 0;
  std::vector<std::string> feature_names;
  std::string target_name;

  std::size_t rows() const noexcept { return targets.size(); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(features.cols()); }
};

inline constexpr double kDefaultTrainFraction = 0.10;

// Builds a Dataset from raw columns. With `normalize`, every feature column
// is min-max scaled to [0, 1] and the target is min-max scaled with the
// training prefix's range and clipped. Without it the targets must already
// lie in [0, 1].
Dataset make_dataset(Eigen::MatrixXd features, std::vector<double> targets,
                     double train_fraction = kDefaultTrainFraction, bool normalize = true);

/// Header row required. Non-numeric cells are rejected with their row number.
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 bool normalize = true, double train_fraction = kDefaultTrainFraction);

/// Smooth nonlinear regression problem used when no public dataset is at hand.
Dataset synthetic_regression(std::size_t rows, std::size_t dims, std::uint64_t seed,
                             double train_fraction = kDefaultTrainFraction);

/// Writes a dataset (already scaled) as CSV with a `target` column last.
void write_csv(const Dataset& d, const std::filesystem::path& path);

enum class KernelKind { kRbf, kLaplacian };

/// RBF: exp(-|x1-x2|_2^2 / (2 sigma^2)). Laplacian: exp(-|x1-x2|_1 / sigma).
double kernel_eval(KernelKind kind, double sigma, std::span<const double> x1,
                   std::span<const double> x2);

Eigen::MatrixXd gram_matrix(KernelKind kind, double sigma, const Eigen::MatrixXd& x);

class ExpertModel {
 public:
  enum class Kind { kRbfKernelRidge, kLaplacianKernelRidge, kLinear };

  static ExpertModel kernel(KernelKind kernel, double sigma, Eigen::MatrixXd support,
                            Eigen::VectorXd coefficients);
  static ExpertModel linear(Eigen::VectorXd weights, double intercept);

  Kind kind() const noexcept { return kind_; }
  double sigma() const noexcept { return sigma_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coef_; }
  double intercept() const noexcept { return intercept_; }
  const Eigen::MatrixXd& support() const noexcept { return support_; }
  /// e.g. "rbf(0.01)", "laplacian(100)", "linear".
  std::string name() const;

  double predict(std::span<const double> x) const;
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;

 private:
  Kind kind_ = Kind::kLinear;
  double sigma_ = 0.0;
  Eigen::MatrixXd support_;
  Eigen::VectorXd coef_;
  double intercept_ = 0.0;
};

/// Solves (G + lambda I) a = y by Cholesky. Throws NumericError when the
/// system is not positive definite (only possible for lambda <= 0).
ExpertModel fit_kernel_ridge(KernelKind kind, double sigma, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y, double lambda);

/// Ordinary least squares with an intercept.
ExpertModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct PoolOptions {
  double lambda = 1.0;
  /// Kernel models train on at most this many evenly spaced prefix rows.
  std::size_t max_kernel_rows = 500;
};

inline constexpr std::size_t kPoolSize = 9;
inline constexpr double kRbfBandwidths[] = {1e-2, 1e-1, 1.0, 10.0, 100.0};
inline constexpr double kLaplacianBandwidths[] = {1e-2, 1.0, 100.0};

/// Five RBF and three Laplacian kernel ridge models plus one linear model,
/// all fit on the training prefix. Needs at least 10 prefix rows.
std::vector<ExpertModel> train_expert_pool(const Dataset& d, const PoolOptions& options = {});

/// clip((prediction - y)^2, 0, 1).
double prediction_loss(const ExpertModel& model, std::span<const double> x, double y);

/// Predictions of every expert on the stream rows [first_row, N).
struct PredictionTable {
  Eigen::MatrixXd predictions;  // rows x K
  std::vector<double> targets;

  std::size_t rounds() const noexcept { return targets.size(); }
  std::size_t num_experts() const noexcept { return static_cast<std::size_t>(predictions.cols()); }
  /// Clipped squared errors, the losses the learners see.
  LossTable losses() const;
};

PredictionTable predict_stream(const std::vector<ExpertModel>& pool, const Dataset& d,
                               std::size_t first_row);

void save_pool(const std::vector<ExpertModel>& pool, const std::filesystem::path& path);
std::vector<ExpertModel> load_pool(const std::filesystem::path& path);

}  // namespace graphbandit

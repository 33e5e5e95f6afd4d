#include <gtest/gtest.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "graphbandit/errors.hpp"
#include "graphbandit/experts.hpp"

namespace gb = graphbandit;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const gb::IngestionError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(LoadCsv, SmallUnnormalized) {
  const auto path = write_temp("gb_ds_small.csv", "x1,x2,y\n1,2,0.5\n3,4,0.25\n5,6,1\n");
  const auto d = gb::load_csv(path, "y", false, 1.0);
  ASSERT_EQ(d.rows(), 3u);
  EXPECT_EQ(d.dims(), 2u);
  EXPECT_EQ(d.features(1, 0), 3.0);
  EXPECT_EQ(d.features(2, 1), 6.0);
  EXPECT_EQ(d.targets, (std::vector<double>{0.5, 0.25, 1.0}));
  EXPECT_EQ(d.target_name, "y");
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"x1", "x2"}));
}

TEST(LoadCsv, TargetColumnMayBeAnywhere) {
  const auto path = write_temp("gb_ds_mid.csv", "a,target,b\n0,10,1\n1,20,2\n2,30,3\n");
  const auto d = gb::load_csv(path, "target", true, 1.0);
  EXPECT_EQ(d.targets, (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(d.dims(), 2u);
  EXPECT_DOUBLE_EQ(d.features(1, 1), 0.5);
}

TEST(LoadCsv, Errors) {
  const auto path = write_temp("gb_ds_err.csv", "a,b\n1,2\n");
  const auto missing = message_of([&] { gb::load_csv(path, "price"); });
  EXPECT_NE(missing.find("price"), std::string::npos);

  const auto bad = write_temp("gb_ds_bad.csv", "a,y\n1,0.5\n2,0.5\noops,0.5\n");
  const auto text = message_of([&] { gb::load_csv(bad, "y"); });
  EXPECT_NE(text.find(":4:"), std::string::npos);
  EXPECT_NE(text.find("oops"), std::string::npos);

  const auto ragged = write_temp("gb_ds_ragged.csv", "a,y\n1\n");
  EXPECT_THROW(gb::load_csv(ragged, "y"), gb::IngestionError);
  const auto out_of_range = write_temp("gb_ds_range.csv", "a,y\n1,3\n");
  EXPECT_THROW(gb::load_csv(out_of_range, "y", false), gb::IngestionError);
  EXPECT_THROW(gb::load_csv("/nonexistent.csv", "y"), gb::IngestionError);
}

TEST(Dataset, TargetsScaledWithPrefixRange) {
  Eigen::MatrixXd x(5, 1);
  x << 0, 1, 2, 3, 4;
  // prefix (2 rows) spans [10, 20]; later values clip
  const auto d = gb::make_dataset(x, {10, 20, 15, 5, 40}, 0.4);
  EXPECT_EQ(d.train_rows, 2u);
  EXPECT_EQ(d.targets, (std::vector<double>{0.0, 1.0, 0.5, 0.0, 1.0}));
  EXPECT_DOUBLE_EQ(d.features(2, 0), 0.5);
  EXPECT_THROW(gb::make_dataset(x, {1, 2, 3, 4, 5}, 0.0), gb::ArgumentError);
}

TEST(Kernel, Examples) {
  const double a[] = {0.0, 0.0}, b[] = {1.0, 2.0};
  EXPECT_DOUBLE_EQ(gb::kernel_eval(gb::KernelKind::kRbf, 1.0, a, b), std::exp(-2.5));
  EXPECT_DOUBLE_EQ(gb::kernel_eval(gb::KernelKind::kLaplacian, 1.0, a, b), std::exp(-3.0));
  EXPECT_DOUBLE_EQ(gb::kernel_eval(gb::KernelKind::kRbf, 2.0, a, b), std::exp(-5.0 / 8.0));
  EXPECT_EQ(gb::kernel_eval(gb::KernelKind::kRbf, 0.1, b, b), 1.0);
  EXPECT_THROW(gb::kernel_eval(gb::KernelKind::kRbf, 0.0, a, b), gb::ArgumentError);
}

TEST(Kernel, GramMatricesArePositiveSemidefinite) {
  gb::Rng rng(1);
  Eigen::MatrixXd x(40, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();
  for (auto kind : {gb::KernelKind::kRbf, gb::KernelKind::kLaplacian}) {
    for (double sigma : {0.01, 1.0, 100.0}) {
      const Eigen::MatrixXd g = gb::gram_matrix(kind, sigma, x);
      EXPECT_TRUE(g.isApprox(g.transpose()));
      // the ridge keeps tiny eigenvalues away from zero
      Eigen::LLT<Eigen::MatrixXd> llt(g + Eigen::MatrixXd::Identity(40, 40) * 1e-9);
      EXPECT_EQ(llt.info(), Eigen::Success) << sigma;
      const double row[] = {x(3, 0), x(3, 1), x(3, 2)}, col[] = {x(7, 0), x(7, 1), x(7, 2)};
      EXPECT_DOUBLE_EQ(g(3, 7), gb::kernel_eval(kind, sigma, row, col));
    }
  }
}

TEST(Ridge, OneByOneSystem) {
  Eigen::MatrixXd x(1, 1);
  x << 0.3;
  Eigen::VectorXd y(1);
  y << 1.0;
  const auto m = gb::fit_kernel_ridge(gb::KernelKind::kRbf, 1.0, x, y, 1.0);
  EXPECT_DOUBLE_EQ(m.coefficients()(0), 0.5);
  const double at[] = {0.3};
  EXPECT_DOUBLE_EQ(m.predict(at), 0.5);
  EXPECT_EQ(m.name(), "rbf(1)");
  EXPECT_THROW(gb::fit_kernel_ridge(gb::KernelKind::kRbf, 1.0, x, y, -1.0), gb::NumericError);
}

TEST(Ridge, LinearRecoversExactPlane) {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 1, 0, 0, 1;
  Eigen::VectorXd y(3);
  for (int r = 0; r < 3; ++r) y(r) = 0.5 + 2.0 * x(r, 0) - x(r, 1);
  const auto m = gb::fit_linear(x, y);
  EXPECT_NEAR(m.intercept(), 0.5, 1e-8);
  EXPECT_NEAR(m.coefficients()(0), 2.0, 1e-8);
  EXPECT_NEAR(m.coefficients()(1), -1.0, 1e-8);
  const double at[] = {0.7, 0.2};
  EXPECT_NEAR(m.predict(at), 0.5 + 1.4 - 0.2, 1e-8);
  EXPECT_EQ(m.name(), "linear");
}

TEST(Loss, Examples) {
  const auto m = gb::ExpertModel::linear(Eigen::VectorXd::Zero(1), 0.5);
  const double x[] = {0.0};
  EXPECT_EQ(gb::prediction_loss(m, x, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(gb::prediction_loss(m, x, 0.8), 0.09);
  const auto far = gb::ExpertModel::linear(Eigen::VectorXd::Zero(1), 3.0);
  EXPECT_EQ(gb::prediction_loss(far, x, 0.0), 1.0);
}

TEST(Pool, TrainsNineExpertsWithBoundedLosses) {
  const auto d = gb::synthetic_regression(400, 3, 2);
  const auto pool = gb::train_expert_pool(d);
  ASSERT_EQ(pool.size(), gb::kPoolSize);
  const std::vector<std::string> names{"rbf(0.01)",     "rbf(0.1)",    "rbf(1)",
                                       "rbf(10)",       "rbf(100)",    "laplacian(0.01)",
                                       "laplacian(1)",  "laplacian(100)", "linear"};
  for (std::size_t i = 0; i < pool.size(); ++i) EXPECT_EQ(pool[i].name(), names[i]);
  const auto stream = gb::predict_stream(pool, d, d.train_rows);
  EXPECT_EQ(stream.rounds(), d.rows() - d.train_rows);
  const auto losses = stream.losses();
  for (double l : losses.values()) {
    ASSERT_GE(l, 0.0);
    ASSERT_LE(l, 1.0);
  }
  // the table matches per-row prediction_loss
  for (std::size_t t = 1; t <= losses.rounds(); t += 37) {
    const std::size_t row = d.train_rows + t - 1;
    const Eigen::RowVectorXd xr = d.features.row(static_cast<Eigen::Index>(row));
    for (std::size_t i = 0; i < pool.size(); ++i) {
      EXPECT_DOUBLE_EQ(losses(t, i), gb::prediction_loss(pool[i], {xr.data(), 3}, d.targets[row]));
    }
  }
}

TEST(Pool, DeterministicAndRoundTrips) {
  const auto d = gb::synthetic_regression(300, 2, 3);
  const auto a = gb::train_expert_pool(d);
  const auto b = gb::train_expert_pool(d);
  const auto pa = gb::predict_stream(a, d, d.train_rows);
  EXPECT_EQ(pa.predictions, gb::predict_stream(b, d, d.train_rows).predictions);

  const auto path = std::filesystem::temp_directory_path() / "gb_pool.json";
  gb::save_pool(a, path);
  const auto loaded = gb::load_pool(path);
  ASSERT_EQ(loaded.size(), a.size());
  EXPECT_EQ(gb::predict_stream(loaded, d, d.train_rows).predictions, pa.predictions);

  EXPECT_THROW(gb::load_pool(write_temp("gb_pool_bad.json", "{\"version\": 7}")), gb::IngestionError);
  EXPECT_THROW(gb::load_pool(write_temp("gb_pool_text.json", "nope")), gb::IngestionError);
}

TEST(Pool, NeedsTenTrainingRows) {
  const auto d = gb::synthetic_regression(50, 2, 4);  // 5 prefix rows
  EXPECT_THROW(gb::train_expert_pool(d), gb::ArgumentError);
}

TEST(Synthetic, ScaledAndSeeded) {
  const auto a = gb::synthetic_regression(200, 4, 5);
  const auto b = gb::synthetic_regression(200, 4, 5);
  const auto c = gb::synthetic_regression(200, 4, 6);
  EXPECT_EQ(a.targets, b.targets);
  EXPECT_NE(a.targets, c.targets);
  EXPECT_EQ(a.train_rows, 20u);
  EXPECT_GE(a.features.minCoeff(), 0.0);
  EXPECT_LE(a.features.maxCoeff(), 1.0);
  for (double y : a.targets) {
    ASSERT_GE(y, 0.0);
    ASSERT_LE(y, 1.0);
  }
}

TEST(Synthetic, WriteThenLoad) {
  const auto d = gb::synthetic_regression(60, 2, 7);
  const auto path = std::filesystem::temp_directory_path() / "gb_synth.csv";
  gb::write_csv(d, path);
  const auto back = gb::load_csv(path, "target", false);
  ASSERT_EQ(back.rows(), d.rows());
  for (std::size_t r = 0; r < d.rows(); ++r) EXPECT_NEAR(back.targets[r], d.targets[r], 1e-15);
  EXPECT_TRUE(back.features.isApprox(d.features, 1e-15));
}

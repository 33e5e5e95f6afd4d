#include "graphbandit/experts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "graphbandit/errors.hpp"
#include "graphbandit/rng.hpp"

namespace graphbandit {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) {
    const auto b = cell.find_first_not_of(" \t\"");
    const auto e = cell.find_last_not_of(" \t\"");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size() && std::isfinite(out);
}

std::size_t train_count(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ArgumentError("dataset: train fraction must lie in (0, 1]");
  }
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(count, 1, n);
}

const char* kind_tag(ExpertModel::Kind k) {
  switch (k) {
    case ExpertModel::Kind::kRbfKernelRidge:
      return "rbf";
    case ExpertModel::Kind::kLaplacianKernelRidge:
      return "laplacian";
    case ExpertModel::Kind::kLinear:
      return "linear";
  }
  return "?";
}

}  // namespace

Dataset make_dataset(Eigen::MatrixXd features, std::vector<double> targets, double train_fraction,
                     bool normalize) {
  const std::size_t n = targets.size();
  if (n == 0) throw ArgumentError("dataset: no rows");
  if (static_cast<std::size_t>(features.rows()) != n) {
    throw ArgumentError("dataset: feature and target row counts differ");
  }
  Dataset d;
  d.train_rows = train_count(n, train_fraction);
  if (normalize) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      const double lo = features.col(c).minCoeff();
      const double hi = features.col(c).maxCoeff();
      if (hi > lo) {
        features.col(c) = (features.col(c).array() - lo) / (hi - lo);
      } else {
        features.col(c).setZero();
      }
    }
    const auto prefix_end = targets.begin() + static_cast<std::ptrdiff_t>(d.train_rows);
    const double lo = *std::min_element(targets.begin(), prefix_end);
    const double hi = *std::max_element(targets.begin(), prefix_end);
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& y : targets) y = std::clamp((y - lo) / span, 0.0, 1.0);
  } else {
    for (std::size_t r = 0; r < n; ++r) {
      if (!(targets[r] >= 0.0 && targets[r] <= 1.0)) {
        throw IngestionError("dataset: row " + std::to_string(r + 1) +
                             " target outside [0, 1]; enable normalization");
      }
    }
  }
  d.features = std::move(features);
  d.targets = std::move(targets);
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 bool normalize, double train_fraction) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open dataset " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw IngestionError(path.string() + ": empty file");
  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end()) {
    throw IngestionError(path.string() + ": target column '" + target_column + "' not found");
  }
  const auto target_idx = static_cast<std::size_t>(target_it - header.begin());

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IngestionError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], values[c])) {
        throw IngestionError(path.string() + ":" + std::to_string(line_no) +
                             ": non-numeric cell '" + cells[c] + "' in column '" + header[c] + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw IngestionError(path.string() + ": no data rows");

  const std::size_t d = header.size() - 1;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  std::vector<double> y(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::Index c_out = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == target_idx) {
        y[r] = rows[r][c];
      } else {
        x(static_cast<Eigen::Index>(r), c_out++) = rows[r][c];
      }
    }
  }
  Dataset out = make_dataset(std::move(x), std::move(y), train_fraction, normalize);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_idx) out.feature_names.push_back(header[c]);
  }
  out.target_name = target_column;
  return out;
}

Dataset synthetic_regression(std::size_t rows, std::size_t dims, std::uint64_t seed,
                             double train_fraction) {
  if (dims < 2) throw ArgumentError("synthetic_regression: need at least two features");
  Rng rng(seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
  std::vector<double> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < dims; ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rng.uniform();
    const auto row = x.row(static_cast<Eigen::Index>(r));
    // Box-Muller noise.
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    const double noise = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    double signal = std::sin(2.0 * std::numbers::pi * row(0)) + 2.0 * row(1) * row(1);
    for (std::size_t c = 2; c < dims; ++c) signal += 0.5 * row(static_cast<Eigen::Index>(c)) * row(static_cast<Eigen::Index>(c - 1));
    y[r] = signal + 0.1 * noise;
  }
  Dataset d = make_dataset(std::move(x), std::move(y), train_fraction, true);
  for (std::size_t c = 0; c < dims; ++c) d.feature_names.push_back("x" + std::to_string(c + 1));
  d.target_name = "target";
  return d;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  for (std::size_t c = 0; c < d.dims(); ++c) {
    out << (c < d.feature_names.size() ? d.feature_names[c] : "x" + std::to_string(c + 1)) << ',';
  }
  out << (d.target_name.empty() ? "target" : d.target_name) << '\n';
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.dims(); ++c) out << d.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) << ',';
    out << d.targets[r] << '\n';
  }
}

double kernel_eval(KernelKind kind, double sigma, std::span<const double> x1,
                   std::span<const double> x2) {
  if (!(sigma > 0.0)) throw ArgumentError("kernel_eval: bandwidth must be positive");
  if (x1.size() != x2.size()) throw ArgumentError("kernel_eval: dimension mismatch");
  double dist = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const double diff = x1[i] - x2[i];
    dist += kind == KernelKind::kRbf ? diff * diff : std::abs(diff);
  }
  return kind == KernelKind::kRbf ? std::exp(-dist / (2.0 * sigma * sigma)) : std::exp(-dist / sigma);
}

namespace {

double kernel_rows(KernelKind kind, double sigma, const Eigen::Ref<const Eigen::RowVectorXd>& a,
                   const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  if (kind == KernelKind::kRbf) {
    return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
  }
  return std::exp(-(a - b).lpNorm<1>() / sigma);
}

}  // namespace

Eigen::MatrixXd gram_matrix(KernelKind kind, double sigma, const Eigen::MatrixXd& x) {
  if (!(sigma > 0.0)) throw ArgumentError("gram_matrix: bandwidth must be positive");
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g(i, j) = g(j, i) = kernel_rows(kind, sigma, x.row(i), x.row(j));
    }
  }
  return g;
}

ExpertModel ExpertModel::kernel(KernelKind kernel, double sigma, Eigen::MatrixXd support,
                                Eigen::VectorXd coefficients) {
  if (!(sigma > 0.0)) throw ArgumentError("ExpertModel: bandwidth must be positive");
  if (support.rows() != coefficients.size()) {
    throw ArgumentError("ExpertModel: one coefficient per support row required");
  }
  ExpertModel m;
  m.kind_ = kernel == KernelKind::kRbf ? Kind::kRbfKernelRidge : Kind::kLaplacianKernelRidge;
  m.sigma_ = sigma;
  m.support_ = std::move(support);
  m.coef_ = std::move(coefficients);
  return m;
}

ExpertModel ExpertModel::linear(Eigen::VectorXd weights, double intercept) {
  ExpertModel m;
  m.kind_ = Kind::kLinear;
  m.coef_ = std::move(weights);
  m.intercept_ = intercept;
  return m;
}

std::string ExpertModel::name() const {
  if (kind_ == Kind::kLinear) return "linear";
  std::ostringstream os;
  os << kind_tag(kind_) << '(' << sigma_ << ')';
  return os.str();
}

double ExpertModel::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  if (kind_ == Kind::kLinear) {
    if (x.size() != coef_.size()) throw ArgumentError("predict: dimension mismatch");
    return x.dot(coef_) + intercept_;
  }
  if (x.size() != support_.cols()) throw ArgumentError("predict: dimension mismatch");
  const KernelKind k = kind_ == Kind::kRbfKernelRidge ? KernelKind::kRbf : KernelKind::kLaplacian;
  double f = 0.0;
  for (Eigen::Index r = 0; r < support_.rows(); ++r) {
    f += coef_(r) * kernel_rows(k, sigma_, x, support_.row(r));
  }
  return f;
}

double ExpertModel::predict(std::span<const double> x) const {
  Eigen::Map<const Eigen::RowVectorXd> row(x.data(), static_cast<Eigen::Index>(x.size()));
  return predict(row);
}

ExpertModel fit_kernel_ridge(KernelKind kind, double sigma, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y, double lambda) {
  if (x.rows() != y.size() || x.rows() == 0) throw ArgumentError("fit_kernel_ridge: bad shapes");
  Eigen::MatrixXd a = gram_matrix(kind, sigma, x);
  a.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericError("fit_kernel_ridge: system is not positive definite");
  }
  Eigen::VectorXd coef = llt.solve(y);
  return ExpertModel::kernel(kind, sigma, x, std::move(coef));
}

ExpertModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size() || x.rows() == 0) throw ArgumentError("fit_linear: bad shapes");
  Eigen::MatrixXd design(x.rows(), x.cols() + 1);
  design << x, Eigen::VectorXd::Ones(x.rows());
  const Eigen::VectorXd beta = design.completeOrthogonalDecomposition().solve(y);
  return ExpertModel::linear(beta.head(x.cols()), beta(x.cols()));
}

std::vector<ExpertModel> train_expert_pool(const Dataset& d, const PoolOptions& options) {
  if (d.train_rows < 10) {
    throw ArgumentError("train_expert_pool: training prefix has " + std::to_string(d.train_rows) +
                        " rows, need at least 10");
  }
  const auto n = static_cast<Eigen::Index>(d.train_rows);
  const Eigen::MatrixXd x_train = d.features.topRows(n);
  const Eigen::VectorXd y_train =
      Eigen::Map<const Eigen::VectorXd>(d.targets.data(), n);

  Eigen::MatrixXd x_kernel = x_train;
  Eigen::VectorXd y_kernel = y_train;
  if (options.max_kernel_rows > 0 && d.train_rows > options.max_kernel_rows) {
    const auto m = static_cast<Eigen::Index>(options.max_kernel_rows);
    x_kernel.resize(m, x_train.cols());
    y_kernel.resize(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const Eigen::Index src = r * n / m;
      x_kernel.row(r) = x_train.row(src);
      y_kernel(r) = y_train(src);
    }
  }

  std::vector<ExpertModel> pool;
  pool.reserve(kPoolSize);
  for (double s : kRbfBandwidths) {
    pool.push_back(fit_kernel_ridge(KernelKind::kRbf, s, x_kernel, y_kernel, options.lambda));
  }
  for (double s : kLaplacianBandwidths) {
    pool.push_back(fit_kernel_ridge(KernelKind::kLaplacian, s, x_kernel, y_kernel, options.lambda));
  }
  pool.push_back(fit_linear(x_train, y_train));
  return pool;
}

double prediction_loss(const ExpertModel& model, std::span<const double> x, double y) {
  const double e = model.predict(x) - y;
  return std::clamp(e * e, 0.0, 1.0);
}

LossTable PredictionTable::losses() const {
  const std::size_t t = rounds();
  const std::size_t k = num_experts();
  std::vector<double> values(t * k);
  for (std::size_t r = 0; r < t; ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      const double e = predictions(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) - targets[r];
      values[r * k + i] = std::clamp(e * e, 0.0, 1.0);
    }
  }
  return LossTable(t, k, std::move(values));
}

PredictionTable predict_stream(const std::vector<ExpertModel>& pool, const Dataset& d,
                               std::size_t first_row) {
  if (first_row > d.rows()) throw ArgumentError("predict_stream: first row past the end");
  const auto t = static_cast<Eigen::Index>(d.rows() - first_row);
  PredictionTable out;
  out.predictions.resize(t, static_cast<Eigen::Index>(pool.size()));
  out.targets.assign(d.targets.begin() + static_cast<std::ptrdiff_t>(first_row), d.targets.end());
  for (Eigen::Index r = 0; r < t; ++r) {
    const auto row = d.features.row(static_cast<Eigen::Index>(first_row) + r);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      out.predictions(r, static_cast<Eigen::Index>(i)) = pool[i].predict(row);
    }
  }
  return out;
}

void save_pool(const std::vector<ExpertModel>& pool, const std::filesystem::path& path) {
  using nlohmann::json;
  json experts = json::array();
  for (const auto& m : pool) {
    json e;
    e["kind"] = kind_tag(m.kind());
    e["sigma"] = m.sigma();
    e["intercept"] = m.intercept();
    e["coefficients"] = std::vector<double>(m.coefficients().data(),
                                            m.coefficients().data() + m.coefficients().size());
    json support = json::array();
    for (Eigen::Index r = 0; r < m.support().rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(m.support().cols()));
      for (Eigen::Index c = 0; c < m.support().cols(); ++c) row[static_cast<std::size_t>(c)] = m.support()(r, c);
      support.push_back(row);
    }
    e["support"] = support;
    experts.push_back(e);
  }
  json doc = {{"format", "graphbandit-experts"}, {"version", 1}, {"experts", experts}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump() << '\n';
}

std::vector<ExpertModel> load_pool(const std::filesystem::path& path) {
  using nlohmann::json;
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open model file " + path.string());
  try {
    const json doc = json::parse(in);
    if (doc.at("format").get<std::string>() != "graphbandit-experts" ||
        doc.at("version").get<int>() != 1) {
      throw IngestionError(path.string() + ": not a version-1 expert pool file");
    }
    std::vector<ExpertModel> pool;
    for (const auto& e : doc.at("experts")) {
      const auto kind = e.at("kind").get<std::string>();
      const auto coef = e.at("coefficients").get<std::vector<double>>();
      Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
      if (kind == "linear") {
        pool.push_back(ExpertModel::linear(std::move(c), e.at("intercept").get<double>()));
        continue;
      }
      const auto rows = e.at("support").get<std::vector<std::vector<double>>>();
      const Eigen::Index cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
      Eigen::MatrixXd support(static_cast<Eigen::Index>(rows.size()), cols);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != cols) {
          throw IngestionError(path.string() + ": ragged support matrix");
        }
        for (Eigen::Index col = 0; col < cols; ++col) support(static_cast<Eigen::Index>(r), col) = rows[r][static_cast<std::size_t>(col)];
      }
      const KernelKind k = kind == "rbf" ? KernelKind::kRbf : KernelKind::kLaplacian;
      if (kind != "rbf" && kind != "laplacian") throw IngestionError(path.string() + ": unknown expert kind " + kind);
      pool.push_back(ExpertModel::kernel(k, e.at("sigma").get<double>(), std::move(support), std::move(c)));
    }
    return pool;
  } catch (const json::exception& ex) {
    throw IngestionError(path.string() + ": " + ex.what());
  }
}

}  // namespace graphbandit

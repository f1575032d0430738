#include "slnlap/model.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slnlap/errors.hpp"

namespace slnlap {

namespace {

constexpr double kSymmetryRelTol = 1e-12;
constexpr double kNearZeroRelTol = 1e-9;

}  // namespace

LognormalModel LognormalModel::from_parts(Vector mu, Matrix sigma,
                                          std::string name) {
  const auto n = mu.size();
  if (n < 1) throw DimensionMismatch("mu must have at least one entry");
  if (sigma.rows() != n || sigma.cols() != n) {
    std::ostringstream os;
    os << "mu has length " << n << " but sigma is " << sigma.rows() << "x"
       << sigma.cols();
    throw DimensionMismatch(os.str());
  }

  const double scale = sigma.cwiseAbs().maxCoeff();
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryRelTol * std::max(scale, 1e-300)) {
    throw NotPositiveDefinite("sigma is not symmetric");
  }
  // Tolerate decimal-literal round-off only.
  sigma = ((sigma + sigma.transpose()) / 2.0).eval();

  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("Cholesky factorisation failed");
  }
  Matrix chol = llt.matrixL();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(chol(i, i) > 0.0)) {
      throw NotPositiveDefinite("nonpositive Cholesky pivot");
    }
  }

  // D from the factor: two triangular solves, D = L^-T L^-1.
  Matrix precision = Matrix::Identity(n, n);
  chol.triangularView<Eigen::Lower>().solveInPlace(precision);
  chol.transpose().triangularView<Eigen::Upper>().solveInPlace(precision);
  precision = ((precision + precision.transpose()) / 2.0).eval();

  LognormalModel m;
  m.dim = static_cast<int>(n);
  m.mu = std::move(mu);
  m.sigma = std::move(sigma);
  m.precision = std::move(precision);
  m.chol = std::move(chol);
  m.row_sums = m.precision.rowwise().sum();
  m.name = std::move(name);

  const double dmax = m.precision.cwiseAbs().maxCoeff();
  m.row_sum_near_zero.assign(m.dim, false);
  bool any_positive = false;
  for (int i = 0; i < m.dim; ++i) {
    if (std::abs(m.row_sums[i]) <= kNearZeroRelTol * dmax) {
      m.row_sum_near_zero[i] = true;
    }
    any_positive = any_positive || m.row_sums[i] > 0.0;
  }
  // Positive definiteness forces at least one positive row sum.
  if (!any_positive) {
    throw NotPositiveDefinite("no positive row sum; sigma cannot be PD");
  }
  return m;
}

LognormalModel load_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object() || !doc.contains("mu") || !doc.contains("sigma")) {
    throw ParseError("document must contain \"mu\" and \"sigma\"");
  }
  const auto& jmu = doc["mu"];
  const auto& jsig = doc["sigma"];
  if (!jmu.is_array() || jmu.empty()) throw ParseError("\"mu\" must be a nonempty array");
  if (!jsig.is_array()) throw ParseError("\"sigma\" must be an array of rows");

  const auto n = static_cast<Eigen::Index>(jmu.size());
  Vector mu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!jmu[i].is_number()) throw ParseError("\"mu\" entries must be numbers");
    mu[i] = jmu[i].get<double>();
  }
  if (static_cast<Eigen::Index>(jsig.size()) != n) {
    throw DimensionMismatch("sigma row count differs from mu length");
  }
  Matrix sigma(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = jsig[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw DimensionMismatch("sigma must be square with order = len(mu)");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!row[j].is_number()) throw ParseError("\"sigma\" entries must be numbers");
      sigma(i, j) = row[j].get<double>();
    }
  }
  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError("\"name\" must be a string");
    name = doc["name"].get<std::string>();
  }
  return LognormalModel::from_parts(std::move(mu), std::move(sigma),
                                    std::move(name));
}

LognormalModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

RowSumReport row_sums(const LognormalModel& model) {
  RowSumReport r;
  r.a = model.row_sums;
  r.near_zero = model.row_sum_near_zero;
  for (int i = 0; i < model.dim; ++i) {
    (r.a[i] > 0.0 ? r.positive : r.nonpositive).push_back(i);
  }
  r.all_positive = r.nonpositive.empty();
  return r;
}

}  // namespace slnlap

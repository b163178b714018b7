#include "fedbench/linreg.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "fedbench/errors.hpp"

namespace fedbench::linreg {

namespace {

void check_shapes(const Matrix& x, const std::vector<double>& y,
                  const std::vector<double>& theta) {
  if (x.size() != y.size()) throw InvalidParameterError("row count mismatch between X and y");
  for (const auto& row : x)
    if (row.size() != theta.size())
      throw InvalidParameterError("model length does not match feature count");
}

std::vector<double> residuals(const Matrix& x, const std::vector<double>& y,
                              const std::vector<double>& theta) {
  std::vector<double> d(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    double u = 0;
    for (size_t j = 0; j < theta.size(); ++j) u += theta[j] * x[i][j];
    d[i] = u - y[i];
  }
  return d;
}

}  // namespace

std::vector<double> gradient(const Matrix& x, const std::vector<double>& y,
                             const std::vector<double>& theta, double reg_lambda,
                             GradientForm form) {
  check_shapes(x, y, theta);
  std::vector<double> d = residuals(x, y, theta);
  std::vector<double> g(theta.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < theta.size(); ++j) g[j] += d[i] * x[i][j];
  double data_scale = form == GradientForm::MeanSquare && !x.empty()
                          ? 2.0 / static_cast<double>(x.size())
                          : 1.0;
  for (size_t j = 0; j < theta.size(); ++j) g[j] = data_scale * g[j] + reg_lambda * theta[j];
  return g;
}

double loss(const Matrix& x, const std::vector<double>& y, const std::vector<double>& theta,
            double reg_lambda, GradientForm form) {
  check_shapes(x, y, theta);
  double ssr = 0;
  for (double di : residuals(x, y, theta)) ssr += di * di;
  if (form == GradientForm::MeanSquare && !x.empty()) ssr /= static_cast<double>(x.size());
  double reg = 0;
  for (double t : theta) reg += t * t;
  return ssr + 0.5 * reg_lambda * reg;
}

GdTrace gd_train(const Matrix& x, const std::vector<double>& y, const GdOptions& options) {
  if (x.empty()) throw InvalidParameterError("cannot train on an empty dataset");
  size_t n_features = x[0].size();
  GdTrace trace;
  trace.model = options.initial_model.empty() ? std::vector<double>(n_features, 0.0)
                                              : options.initial_model;
  if (trace.model.size() != n_features)
    throw InvalidParameterError("initial model length does not match feature count");

  for (size_t iter = 0; iter < options.max_iters; ++iter) {
    std::vector<double> g = gradient(x, y, trace.model, options.reg_lambda, options.form);
    double l = loss(x, y, trace.model, options.reg_lambda, options.form);
    for (size_t j = 0; j < n_features; ++j) trace.model[j] -= options.learning_rate * g[j];

    trace.gradient_history.push_back(std::move(g));
    trace.loss_history.push_back(l);
    trace.model_history.push_back(trace.model);

    if (options.loss_tolerance > 0 && trace.loss_history.size() >= 2) {
      double prev = trace.loss_history[trace.loss_history.size() - 2];
      if (std::abs(l - prev) < options.loss_tolerance * std::max(1.0, std::abs(prev))) break;
    }
  }
  return trace;
}

std::vector<double> closed_form_ridge(const Matrix& x, const std::vector<double>& y,
                                      double ridge_coefficient) {
  if (x.empty()) throw InvalidParameterError("cannot solve an empty system");
  if (ridge_coefficient < 0) throw InvalidParameterError("ridge coefficient must be nonnegative");
  auto rows = static_cast<Eigen::Index>(x.size());
  auto cols = static_cast<Eigen::Index>(x[0].size());
  Eigen::MatrixXd mx(rows, cols);
  Eigen::VectorXd vy(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    vy(i) = y[i];
    for (Eigen::Index j = 0; j < cols; ++j) mx(i, j) = x[i][j];
  }
  Eigen::MatrixXd normal = mx.transpose() * mx;
  normal.diagonal().array() += ridge_coefficient;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (!lu.isInvertible())
    throw SingularMatrixError(
        "normal matrix is singular; use a positive regularization strength");
  Eigen::VectorXd theta = lu.solve(mx.transpose() * vy);
  return {theta.data(), theta.data() + theta.size()};
}

std::vector<double> predict(const Matrix& x, const std::vector<double>& theta) {
  std::vector<double> out(x.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != theta.size())
      throw InvalidParameterError("prediction row width does not match the model");
    for (size_t j = 0; j < theta.size(); ++j) out[i] += theta[j] * x[i][j];
  }
  return out;
}

double mse(const std::vector<double>& predictions, const std::vector<double>& truth) {
  if (predictions.size() != truth.size() || predictions.empty())
    throw InvalidParameterError("mse needs equal-length nonempty vectors");
  double acc = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    double e = predictions[i] - truth[i];
    acc += e * e;
  }
  return acc / static_cast<double>(truth.size());
}

double r_squared(const std::vector<double>& predictions, const std::vector<double>& truth) {
  if (predictions.size() != truth.size() || predictions.empty())
    throw InvalidParameterError("r_squared needs equal-length nonempty vectors");
  double mean = 0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - predictions[i]) * (truth[i] - predictions[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0) return ss_res == 0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace fedbench::linreg

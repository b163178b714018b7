#pragma once

#include <cstdint>
#include <vector>

namespace fedbench::linreg {

// Which quadratic the gradient differentiates. The two federated modes in
// this project use different conventions, both checked against finite
// differences in the tests.
enum class GradientForm {
  // g = X^T (X theta - y) + lambda * theta; reported loss is
  // sum d_i^2 + (lambda/2) ||theta||^2.
  SumHalfSquare,
  // g = (2/N) X^T (X theta - y) + lambda * theta; reported loss is
  // (1/N) sum d_i^2 + (lambda/2) ||theta||^2.
  MeanSquare,
};

struct GdOptions {
  double learning_rate = 0.01;
  double reg_lambda = 0.0;
  size_t max_iters = 100;
  double loss_tolerance = 0.0;  // relative change that counts as converged
  GradientForm form = GradientForm::SumHalfSquare;
  std::vector<double> initial_model;  // empty = zeros
};

struct GdTrace {
  std::vector<double> model;
  std::vector<double> loss_history;                   // one entry per iteration
  std::vector<std::vector<double>> gradient_history;  // gradient used at step t
  std::vector<std::vector<double>> model_history;     // model after step t
};

using Matrix = std::vector<std::vector<double>>;

std::vector<double> gradient(const Matrix& x, const std::vector<double>& y,
                             const std::vector<double>& theta, double reg_lambda,
                             GradientForm form);
double loss(const Matrix& x, const std::vector<double>& y, const std::vector<double>& theta,
            double reg_lambda, GradientForm form);

// Plaintext full-batch gradient descent; the reference trajectory the
// federated runs are compared against. Stops early when
// |L_t - L_{t-1}| < tol * max(1, |L_{t-1}|).
GdTrace gd_train(const Matrix& x, const std::vector<double>& y, const GdOptions& options);

// Normal-equations solve of (X^T X + c I) theta = X^T y. Throws
// SingularMatrixError when c = 0 and X^T X is rank deficient.
std::vector<double> closed_form_ridge(const Matrix& x, const std::vector<double>& y,
                                      double ridge_coefficient);

std::vector<double> predict(const Matrix& x, const std::vector<double>& theta);
double mse(const std::vector<double>& predictions, const std::vector<double>& truth);
double r_squared(const std::vector<double>& predictions, const std::vector<double>& truth);

}  // namespace fedbench::linreg

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fedbench/dataset.hpp"
#include "fedbench/errors.hpp"
#include "fedbench/linreg.hpp"

using namespace fedbench;
using namespace fedbench::linreg;

namespace {

// Independent normal-equations oracle: build X^T X + cI and X^T y by hand
// and solve with Gaussian elimination (partial pivoting). Kept free of the
// implementation path, which goes through Eigen.
std::vector<double> ridge_oracle(const Matrix& x, const std::vector<double>& y, double c) {
  size_t n = x[0].size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < n; ++j) {
      for (size_t l = 0; l < n; ++l) m[j][l] += x[i][j] * x[i][l];
      m[j][n] += x[i][j] * y[i];
    }
  for (size_t j = 0; j < n; ++j) m[j][j] += c;

  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    std::swap(m[col], m[pivot]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col || m[col][col] == 0) continue;
      double f = m[r][col] / m[col][col];
      for (size_t l = col; l <= n; ++l) m[r][l] -= f * m[col][l];
    }
  }
  std::vector<double> theta(n);
  for (size_t j = 0; j < n; ++j) theta[j] = m[j][n] / m[j][j];
  return theta;
}

Matrix random_matrix(std::mt19937_64& gen, size_t rows, size_t cols) {
  std::normal_distribution<double> normal(0, 1);
  Matrix x(rows, std::vector<double>(cols));
  for (auto& r : x)
    for (auto& v : r) v = normal(gen);
  return x;
}

}  // namespace

TEST_CASE("single sample, single feature closed form") {
  CHECK(closed_form_ridge({{1.0}}, {2.0}, 0.0)[0] == doctest::Approx(2.0));
}

TEST_CASE("large ridge penalty shrinks the model toward zero") {
  std::mt19937_64 gen(3);
  Matrix x = random_matrix(gen, 20, 2);
  std::vector<double> y(20, 1.0);
  std::vector<double> theta = closed_form_ridge(x, y, 1e9);
  CHECK(std::abs(theta[0]) < 1e-6);
  CHECK(std::abs(theta[1]) < 1e-6);
}

TEST_CASE("closed form matches the elimination oracle on a random 50x3 system") {
  std::mt19937_64 gen(17);
  Matrix x = random_matrix(gen, 50, 3);
  std::vector<double> y(50);
  std::normal_distribution<double> normal(0, 1);
  for (auto& v : y) v = normal(gen);
  for (double c : {0.0, 0.5, 3.0}) {
    std::vector<double> got = closed_form_ridge(x, y, c);
    std::vector<double> want = ridge_oracle(x, y, c);
    for (size_t j = 0; j < 3; ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-10));
  }
}

TEST_CASE("unregularized singular system reports a helpful error") {
  // duplicated column makes X^T X rank deficient
  Matrix x = {{1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}};
  std::vector<double> y = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(closed_form_ridge(x, y, 0.0), SingularMatrixError);
  CHECK_NOTHROW(closed_form_ridge(x, y, 0.1));
}

TEST_CASE("finite differences confirm both gradient conventions") {
  std::mt19937_64 gen(23);
  Matrix x = random_matrix(gen, 12, 3);
  std::vector<double> y(12);
  std::normal_distribution<double> normal(0, 1);
  for (auto& v : y) v = normal(gen);

  for (GradientForm form : {GradientForm::SumHalfSquare, GradientForm::MeanSquare}) {
    // the objective whose exact gradient the implementation claims
    auto objective = [&](const std::vector<double>& theta) {
      double ssr = 0;
      for (size_t i = 0; i < x.size(); ++i) {
        double d = -y[i];
        for (size_t j = 0; j < theta.size(); ++j) d += theta[j] * x[i][j];
        ssr += d * d;
      }
      if (form == GradientForm::SumHalfSquare) ssr *= 0.5;
      else ssr /= static_cast<double>(x.size());
      double reg = 0;
      for (double t : theta) reg += t * t;
      return ssr + 0.1 * 0.5 * reg;
    };
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> theta(3);
      for (auto& t : theta) t = normal(gen);
      std::vector<double> g = gradient(x, y, theta, 0.1, form);
      for (size_t j = 0; j < 3; ++j) {
        double h = 1e-6 * (1.0 + std::abs(theta[j]));
        std::vector<double> lo = theta, hi = theta;
        lo[j] -= h;
        hi[j] += h;
        double fd = (objective(hi) - objective(lo)) / (2 * h);
        CHECK(g[j] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("gradient descent agrees with the closed form on well-conditioned data") {
  data::SyntheticSpec spec;
  spec.n_samples = 80;
  spec.n_features_a = 2;
  spec.n_features_b = 1;
  spec.true_weights = {1.5, -2.0, 0.75};
  spec.noise_sigma = 0.05;
  spec.seed = 31;
  spec.scaling = data::FeatureScaling::UnitNorm;
  data::DatasetPartition pooled = data::generate_pooled(spec);

  GdOptions options;
  options.learning_rate = 0.4;
  options.reg_lambda = 0.01;
  options.max_iters = 20000;
  options.loss_tolerance = 1e-14;
  options.form = GradientForm::SumHalfSquare;
  GdTrace trace = gd_train(pooled.features, *pooled.labels, options);

  std::vector<double> exact = closed_form_ridge(pooled.features, *pooled.labels, 0.01);
  for (size_t j = 0; j < exact.size(); ++j)
    CHECK(trace.model[j] == doctest::Approx(exact[j]).epsilon(1e-6));
}

TEST_CASE("noiseless data recovers the generating weights") {
  data::SyntheticSpec spec;
  spec.n_samples = 60;
  spec.n_features_a = 2;
  spec.n_features_b = 2;
  spec.true_weights = {2.0, 3.0, -1.0, 0.5};
  spec.noise_sigma = 0.0;
  spec.seed = 77;
  data::DatasetPartition pooled = data::generate_pooled(spec);
  std::vector<double> theta = closed_form_ridge(pooled.features, *pooled.labels, 1e-12);
  for (size_t j = 0; j < 4; ++j)
    CHECK(theta[j] == doctest::Approx(spec.true_weights[j]).epsilon(1e-8));
}

TEST_CASE("metrics behave at the fixed points") {
  CHECK(mse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(mse({1.0, 3.0}, {1.0, 1.0}) == doctest::Approx(2.0));
  CHECK(r_squared({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == doctest::Approx(1.0));
  CHECK(r_squared({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}) == doctest::Approx(0.0));
}

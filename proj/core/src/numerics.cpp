// Copyright 2026 The isdim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <isdim/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include <isdim/errors.hpp>

namespace isdim {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum sum;
  for (double v : values) {
    sum.add(v);
  }
  return sum.value();
}

double log_sum_exp(std::span<const double> values) noexcept {
  double max_value = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    max_value = std::max(max_value, v);
  }
  if (!std::isfinite(max_value)) {
    return max_value;
  }
  CompensatedSum sum;
  for (double v : values) {
    sum.add(std::exp(v - max_value));
  }
  return max_value + std::log(sum.value());
}

double log_sum_exp(const Eigen::VectorXd& values) noexcept {
  return log_sum_exp(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

double mean(std::span<const double> values) {
  require(!values.empty(), "mean of an empty sample");
  return compensated_sum(values) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  require(values.size() >= 2, "standard deviation needs at least two values");
  const double m = mean(values);
  CompensatedSum sum;
  for (double v : values) {
    sum.add((v - m) * (v - m));
  }
  return std::sqrt(sum.value() / static_cast<double>(values.size() - 1));
}

double quantile(std::vector<double> values, double probability) {
  require(!values.empty(), "quantile of an empty sample");
  require(probability >= 0.0 && probability <= 1.0, "quantile probability outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = probability * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Quartiles quartiles(std::span<const double> values) {
  std::vector<double> copy(values.begin(), values.end());
  return {quantile(copy, 0.25), quantile(copy, 0.5), quantile(copy, 0.75)};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionError("fit_line: x and y differ in length");
  }
  if (x.size() < 3) {
    throw FitError("fit_line: at least 3 points are required, got " + std::to_string(x.size()));
  }
  const double mx = mean(x);
  const double my = mean(y);
  CompensatedSum sxx;
  CompensatedSum sxy;
  CompensatedSum syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (!(sxx.value() > 0.0)) {
    throw FitError("fit_line: regressor is constant");
  }
  if (!std::isfinite(sxy.value()) || !std::isfinite(syy.value())) {
    throw FitError("fit_line: non-finite response");
  }
  LinearFit fit;
  fit.points = x.size();
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy.value() > 0.0 ? (sxy.value() * sxy.value()) / (sxx.value() * syy.value()) : 1.0;
  return fit;
}

double max_relative_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_relative_difference: shape mismatch");
  }
  if (a.size() == 0) {
    return 0.0;
  }
  const double scale = std::max(b.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

namespace {

Eigen::MatrixXd spectral_power(const Eigen::MatrixXd& spd, double power) {
  if (spd.rows() != spd.cols()) {
    throw DimensionError("expected a square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spd);
  if (eig.info() != Eigen::Success) {
    throw DefinitenessError("eigendecomposition failed");
  }
  const Eigen::VectorXd values = eig.eigenvalues();
  if (values.size() > 0 && !(values.minCoeff() > 0.0)) {
    throw DefinitenessError("matrix is not positive-definite (smallest eigenvalue " +
                            std::to_string(values.minCoeff()) + ")");
  }
  const Eigen::VectorXd powered = values.array().pow(power);
  return eig.eigenvectors() * powered.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& spd) { return spectral_power(spd, 0.5); }

Eigen::MatrixXd symmetric_inverse_sqrt(const Eigen::MatrixXd& spd) { return spectral_power(spd, -0.5); }

bool is_symmetric(const Eigen::MatrixXd& m, double relative_tolerance) {
  if (m.rows() != m.cols()) {
    return false;
  }
  if (m.size() == 0) {
    return true;
  }
  const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= relative_tolerance * scale;
}

}  // namespace isdim

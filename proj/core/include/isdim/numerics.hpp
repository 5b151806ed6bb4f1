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

#ifndef ISDIM_NUMERICS_HPP
#define ISDIM_NUMERICS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace isdim {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> values) noexcept;

/// log(sum(exp(v))). Returns -inf when every entry is -inf (or v is empty).
double log_sum_exp(std::span<const double> values) noexcept;

double log_sum_exp(const Eigen::VectorXd& values) noexcept;

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1 denominator).
double sample_stddev(std::span<const double> values);

/// Linear-interpolated quantile (Hyndman-Fan type 7) of an unsorted sample.
double quantile(std::vector<double> values, double probability);

struct Quartiles {
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

Quartiles quartiles(std::span<const double> values);

/// Ordinary least squares y = slope * x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Throws FitError with fewer than 3 points or constant x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Largest |a_ij - b_ij| divided by max(|b|_max, tiny).
double max_relative_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Symmetric square root V sqrt(D) V^T of an SPD matrix; throws DefinitenessError.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& spd);

/// Symmetric inverse square root; throws DefinitenessError.
Eigen::MatrixXd symmetric_inverse_sqrt(const Eigen::MatrixXd& spd);

/// Checks symmetry to `relative_tolerance` of the largest entry.
bool is_symmetric(const Eigen::MatrixXd& m, double relative_tolerance = 1e-12);

}  // namespace isdim

#endif

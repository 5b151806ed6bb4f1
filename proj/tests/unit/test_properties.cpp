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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <isdim/filter.hpp>
#include <isdim/inverse.hpp>
#include <isdim/measures.hpp>
#include <isdim/sampler.hpp>
#include <oracles.hpp>

namespace isdim {
namespace {

using isdim::testing::random_matrix;
using isdim::testing::random_spd;
using isdim::testing::random_vector;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(WeightProperties, RhoAndEssRanges) {
  std::mt19937_64 rng(100);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> spread(0.0, 30.0);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 500);
    const double s = spread(rng);
    VectorXd lw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      lw(i) = s * normal(rng);
    }
    const auto est = sampler::rho_from_log_weights(lw, std::min<std::size_t>(100, static_cast<std::size_t>(n)));
    EXPECT_GE(est.rho, 1.0 - 1e-12);
    const double e = sampler::ess(sampler::normalize(lw));
    EXPECT_GE(e, 1.0 - 1e-12);
    EXPECT_LE(e, static_cast<double>(n) * (1.0 + 1e-12));
  }
}

TEST(WeightProperties, NormalizeShiftInvariant) {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 50; ++k) {
    const VectorXd lw = 5.0 * random_vector(rng, 40);
    std::uniform_real_distribution<double> shift(-700.0, 700.0);
    const VectorXd a = sampler::normalize(lw);
    const VectorXd b = sampler::normalize((lw.array() + shift(rng)).matrix());
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(WeightProperties, ConstantTestFunction) {
  const auto model = sampler::gaussian_shift_model(1.0, 2);
  const auto ens = sampler::weigh(model.draw, model.log_g, 500, 7);
  EXPECT_NEAR(sampler::autonormalized_estimate(ens, [](sampler::PointRef) { return -3.25; }), -3.25, 1e-12);
}

TEST(InverseProperties, SandwichAndDimensionBounds) {
  std::mt19937_64 rng(102);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index du = 1 + static_cast<Eigen::Index>(rng() % 12);
    const Eigen::Index dy = 1 + static_cast<Eigen::Index>(rng() % 12);
    const auto ip = inverse::LinearGaussianIP::dense(random_matrix(rng, dy, du), random_spd(rng, du),
                                                     random_spd(rng, dy));
    const auto dims = inverse::intrinsic_dims(inverse::operator_a(ip));
    const double norm = 1.0 + dims.a_spectrum.maxCoeff();
    EXPECT_LE(dims.tau / norm, dims.efd * (1.0 + 1e-12));
    EXPECT_LE(dims.efd, dims.tau * (1.0 + 1e-12));
    EXPECT_LE(dims.efd, static_cast<double>(std::min(du, dy)) + 1e-12);
  }
}

TEST(InverseProperties, ClosedFormEqualsChiSquare) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> pos(0.1, 3.0);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 6);
    VectorXd kd(d);
    VectorXd sd(d);
    VectorXd gd(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      kd(j) = pos(rng);
      sd(j) = pos(rng);
      gd(j) = pos(rng);
    }
    const auto ip = inverse::LinearGaussianIP::diagonal(kd, sd, gd);
    const VectorXd y = random_vector(rng, d);
    const auto w = inverse::whiten(ip, y);
    const double closed = inverse::rho_closed_form_diag(w.lambda, w.z);
    const double chi2 = measures::chi2_divergence(inverse::posterior(ip, y), ip.prior());
    EXPECT_NEAR(std::exp(closed), 1.0 + chi2, 1e-8 * (1.0 + chi2));
  }
}

TEST(InverseProperties, LogRhoMonotoneInNoiseAndDimension) {
  std::mt19937_64 rng(104);
  const VectorXd y = random_vector(rng, 64);
  for (double beta : {0.0, 0.5, 1.5}) {
    double previous = -1.0;
    for (double gamma : {10.0, 1.0, 1e-1, 1e-2, 1e-3}) {
      const inverse::SpectralCascade c(beta, gamma, 64);
      const double v = inverse::cascade_log_rho(c, y);
      EXPECT_GE(v, previous);
      previous = v;
    }
    previous = -1.0;
    for (std::size_t d : {1, 2, 4, 8, 16, 32, 64}) {
      const inverse::SpectralCascade c(beta, 0.1, d);
      const double v = inverse::cascade_log_rho(c, y.head(static_cast<Eigen::Index>(d)));
      EXPECT_GE(v, previous);
      previous = v;
    }
  }
}

TEST(FilterProperties, OptimalNeverExceedsStandard) {
  std::mt19937_64 rng(105);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 5);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 5);
    const auto f = filter::OneStepFilter::dense(random_matrix(rng, n, n), random_matrix(rng, m, n),
                                                random_spd(rng, n), random_spd(rng, n), random_spd(rng, m));
    const auto ops = filter::a_operators(f);
    EXPECT_LE(ops.dims_op.tau, ops.dims_st.tau * (1.0 + 1e-12) + 1e-14);
  }
}

TEST(MeasureProperties, SampleDeterminism) {
  const measures::DenseGaussian g(VectorXd::Ones(3), MatrixXd::Identity(3, 3) * 2.0);
  const MatrixXd a = measures::sample(g, 100, 5);
  const MatrixXd b = measures::sample(g, 100, 5);
  EXPECT_TRUE((a.array() == b.array()).all());
  EXPECT_FALSE((a.array() == measures::sample(g, 100, 6).array()).all());
}

}  // namespace
}  // namespace isdim

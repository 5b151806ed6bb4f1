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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <isdim/errors.hpp>
#include <isdim/filter.hpp>
#include <oracles.hpp>

namespace isdim::filter {
namespace {

using isdim::testing::random_matrix;
using isdim::testing::random_spd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

OneStepFilter identity_filter(Eigen::Index n) {
  const MatrixXd i = MatrixXd::Identity(n, n);
  return OneStepFilter::dense(i, i, i, i, i);
}

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

TEST(OneStepFilter, ScalarValidation) {
  EXPECT_THROW(OneStepFilter::scalar_identity(1.0, 1.0, 1.0, 1.0, -1.0, 1), DefinitenessError);
  EXPECT_THROW(OneStepFilter::scalar_identity(1.0, 1.0, 0.0, 1.0, 1.0, 1), DefinitenessError);
  EXPECT_THROW(OneStepFilter::scalar_identity(1.0, 1.0, 1.0, 1.0, 1.0, 0), InvalidArgument);
  try {
    (void)OneStepFilter::scalar_identity(1.0, 1.0, 1.0, 1.0, -0.5, 1);
  } catch (const DefinitenessError& e) {
    EXPECT_NE(std::string(e.what()).find("covariance scalar must be positive"), std::string::npos);
  }
}

TEST(OneStepFilter, FormAccessors) {
  const auto s = OneStepFilter::scalar_identity(0.5, 2.0, 1.0, 3.0, 4.0, 3);
  EXPECT_EQ(s.state_dim(), 3);
  EXPECT_DOUBLE_EQ(s.M()(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(s.R()(2, 2), 4.0);
  EXPECT_DOUBLE_EQ(s.R()(0, 2), 0.0);
  const auto d = identity_filter(2);
  EXPECT_THROW((void)d.m(), FormError);
  EXPECT_THROW((void)d.with_p(2.0), FormError);
  EXPECT_THROW((void)s.with_p(MatrixXd::Identity(3, 3)), FormError);
  EXPECT_THROW(OneStepFilter::dense(MatrixXd::Identity(2, 2), MatrixXd::Identity(3, 3), MatrixXd::Identity(2, 2),
                                    MatrixXd::Identity(2, 2), MatrixXd::Identity(3, 3)),
               DimensionError);
}

TEST(Reductions, IdentityModel) {
  const auto f = identity_filter(3);
  const auto st = standard_reduction(f);
  EXPECT_LT(max_abs(st.prior_covariance() - 2.0 * MatrixXd::Identity(3, 3)), 1e-15);
  EXPECT_LT(max_abs(st.forward() - MatrixXd::Identity(3, 3)), 1e-15);
  EXPECT_LT(max_abs(st.noise_covariance() - MatrixXd::Identity(3, 3)), 1e-15);
  const auto op = optimal_reduction(f);
  EXPECT_LT(max_abs(op.prior_covariance() - MatrixXd::Identity(3, 3)), 1e-15);
  EXPECT_LT(max_abs(op.noise_covariance() - 2.0 * MatrixXd::Identity(3, 3)), 1e-15);
  const auto a_op = inverse::operator_a(op);
  EXPECT_LT(max_abs(a_op.matrix - 0.5 * MatrixXd::Identity(3, 3)), 1e-15);
}

TEST(Reductions, ZeroDynamicsGivesNoiseOnlyPrior) {
  std::mt19937_64 rng(1);
  const MatrixXd q = random_spd(rng, 3);
  const auto f = OneStepFilter::dense(MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3), random_spd(rng, 3), q,
                                      MatrixXd::Identity(3, 3));
  EXPECT_LT(max_abs(standard_reduction(f).prior_covariance() - q), 1e-14);
  EXPECT_EQ(a_operators(f).dims_op.tau, 0.0);
}

TEST(Reductions, ScalarLambdas) {
  EXPECT_DOUBLE_EQ(lambda_standard(1, 1, 1, 1, 1), 2.0);
  EXPECT_DOUBLE_EQ(lambda_optimal(1, 1, 1, 1, 1), 0.5);
  EXPECT_DOUBLE_EQ(lambda_standard(2, 3, 0.5, 1, 4), 9.0 * (4.0 * 0.5 + 1.0) / 4.0);
  EXPECT_DOUBLE_EQ(lambda_optimal(2, 3, 0.5, 1, 4), 9.0 * 4.0 * 0.5 / (4.0 + 9.0));
  const auto f = OneStepFilter::scalar_identity(1, 1, 1, 1, 1, 1);
  EXPECT_DOUBLE_EQ(inverse::operator_a(reduction(f, ProposalKind::standard)).spectrum(0), 2.0);
}

TEST(Reductions, SilentObservation) {
  const MatrixXd i = MatrixXd::Identity(2, 2);
  const auto f = OneStepFilter::dense(i, MatrixXd::Zero(2, 2), i, i, i);
  const auto ops = a_operators(f);
  EXPECT_EQ(ops.dims_op.tau, 0.0);
  EXPECT_EQ(ops.dims_st.tau, 0.0);
}

TEST(AOperators, WorkedExample) {
  auto f = identity_filter(2);
  MatrixXd p = MatrixXd::Zero(2, 2);
  p.diagonal() << 0.5, 0.25;
  f = f.with_p(p);
  const auto ops = a_operators(f);
  EXPECT_LT(max_abs(ops.a_st.matrix - (p + MatrixXd::Identity(2, 2))), 1e-12);
  EXPECT_LT(max_abs(ops.a_op.matrix - p / 2.0), 1e-12);
  EXPECT_NEAR(ops.dims_st.tau, 2.75, 1e-12);
  EXPECT_NEAR(ops.dims_op.tau, 0.375, 1e-12);
}

TEST(AOperators, ExampleIdentityOnRandomCovariances) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const MatrixXd p = random_spd(rng, 4, 0.01, 3.0);
    const auto ops = a_operators(identity_filter(4).with_p(p));
    EXPECT_LT(max_abs(ops.a_st.matrix - (p + MatrixXd::Identity(4, 4))), 1e-12);
    EXPECT_LT(max_abs(ops.a_op.matrix - p / 2.0), 1e-12);
  }
}

TEST(AOperators, AgreeWithReductions) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto f = OneStepFilter::dense(random_matrix(rng, 3, 3), random_matrix(rng, 2, 3), random_spd(rng, 3),
                                        random_spd(rng, 3), random_spd(rng, 2));
    const auto ops = a_operators(f);
    const auto st = inverse::intrinsic_dims(inverse::operator_a(standard_reduction(f)));
    const auto op = inverse::intrinsic_dims(inverse::operator_a(optimal_reduction(f)));
    EXPECT_NEAR(ops.dims_st.tau, st.tau, 1e-10 * st.tau);
    EXPECT_NEAR(ops.dims_st.efd, st.efd, 1e-10 * st.efd);
    EXPECT_NEAR(ops.dims_op.tau, op.tau, 1e-10 * std::max(op.tau, 1e-300));
    EXPECT_NEAR(ops.dims_op.efd, op.efd, 1e-10 * std::max(op.efd, 1e-300));
    EXPECT_LE(ops.dims_op.tau, ops.dims_st.tau);
  }
}

TEST(AOperators, ScalarPathMatchesDensePath) {
  const auto s = OneStepFilter::scalar_identity(0.7, 1.3, 0.4, 0.9, 0.2, 3);
  const auto d = OneStepFilter::dense(s.M(), s.H(), s.P(), s.Q(), s.R());
  const auto a = a_operators(s);
  const auto b = a_operators(d);
  EXPECT_NEAR(a.dims_st.tau, b.dims_st.tau, 1e-12 * b.dims_st.tau);
  EXPECT_NEAR(a.dims_op.efd, b.dims_op.efd, 1e-12 * b.dims_op.efd);
}

TEST(ConditionedDynamics, ScalarExample) {
  const auto f = OneStepFilter::scalar_identity(1, 1, 1, 1, 1, 1);
  const auto g = conditioned_dynamics(f, VectorXd::Zero(1), VectorXd::Constant(1, 2.0));
  EXPECT_NEAR(g.covariance()(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(g.mean()(0), 1.0, 1e-15);
}

TEST(ConditionedDynamics, SilentObservation) {
  std::mt19937_64 rng(4);
  const MatrixXd m = random_matrix(rng, 2, 2);
  const MatrixXd q = random_spd(rng, 2);
  const auto f = OneStepFilter::dense(m, MatrixXd::Zero(2, 2), MatrixXd::Identity(2, 2), q,
                                      MatrixXd::Identity(2, 2));
  const VectorXd v0 = VectorXd::LinSpaced(2, 1.0, 2.0);
  const auto g = conditioned_dynamics(f, v0, VectorXd::Constant(2, 5.0));
  EXPECT_LT((g.mean() - m * v0).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(max_abs(g.covariance() - q), 1e-14);
}

TEST(ConditionedDynamics, VanishingGain) {
  const auto f = OneStepFilter::scalar_identity(0.8, 1, 1, 1, 1e8, 2);
  const VectorXd v0 = VectorXd::Constant(2, 1.5);
  const auto g = conditioned_dynamics(f, v0, VectorXd::Constant(2, 3.0));
  EXPECT_LT((g.mean() - 0.8 * v0).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_THROW(conditioned_dynamics(f, VectorXd::Zero(3), VectorXd::Zero(2)), DimensionError);
}

TEST(StationaryCovariance, Examples) {
  const auto f = OneStepFilter::scalar_identity(1, 1, 1, 1, 1, 1);
  const double p = stationary_covariance(f);
  EXPECT_NEAR(p, (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
  const auto ops = a_operators(f.with_p(p));
  EXPECT_NEAR(ops.a_st.spectrum(0), (std::sqrt(5.0) + 1.0) / 2.0, 1e-14);
  EXPECT_NEAR(ops.a_op.spectrum(0), (std::sqrt(5.0) - 1.0) / 4.0, 1e-14);
  EXPECT_THROW(stationary_covariance(OneStepFilter::scalar_identity(0.5, 1, 1, 1, 1, 1)), FormError);
  EXPECT_THROW(stationary_covariance(identity_filter(2)), FormError);
}

TEST(StationaryCovariance, LinearInSmallNoise) {
  for (double r : {1e-4, 1e-6, 1e-8}) {
    const double p = stationary_covariance(OneStepFilter::scalar_identity(1, 1, 1, 1, r, 1));
    EXPECT_NEAR(p / r, 1.0, 2.0 * r);
  }
}

TEST(StationaryCovariance, FixedPointOverGrid) {
  for (double q : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    for (double r : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      const auto f = OneStepFilter::scalar_identity(1, 1, 1, q, r, 1);
      const double p = stationary_covariance(f);
      EXPECT_NEAR(kalman_update(f, p), p, 1e-10 * p);
      const MatrixXd pm = kalman_update(f, MatrixXd::Identity(1, 1) * p);
      EXPECT_NEAR(pm(0, 0), p, 1e-10 * p);
    }
  }
}

TEST(KalmanUpdate, Examples) {
  const auto f = OneStepFilter::scalar_identity(1, 1, 1, 1, 1, 1);
  EXPECT_NEAR(kalman_update(f, 1.0), 2.0 / 3.0, 1e-15);
  std::mt19937_64 rng(5);
  const MatrixXd m = random_matrix(rng, 3, 3);
  const MatrixXd p = random_spd(rng, 3);
  const MatrixXd q = random_spd(rng, 3);
  const auto silent = OneStepFilter::dense(m, MatrixXd::Zero(1, 3), p, q, MatrixXd::Identity(1, 1));
  EXPECT_LT(max_abs(kalman_update(silent, p) - (m * p * m.transpose() + q)), 1e-13);
  EXPECT_THROW(kalman_update(silent, -p), DefinitenessError);
}

TEST(KalmanUpdate, DenseMatchesJosephForm) {
  std::mt19937_64 rng(6);
  const MatrixXd m = random_matrix(rng, 3, 3);
  const MatrixXd h = random_matrix(rng, 2, 3);
  const MatrixXd p = random_spd(rng, 3);
  const MatrixXd q = random_spd(rng, 3);
  const MatrixXd r = random_spd(rng, 2);
  const auto f = OneStepFilter::dense(m, h, p, q, r);
  const MatrixXd s = m * p * m.transpose() + q;
  const MatrixXd k = s * h.transpose() * (h * s * h.transpose() + r).inverse();
  const MatrixXd ikh = MatrixXd::Identity(3, 3) - k * h;
  const MatrixXd joseph = ikh * s * ikh.transpose() + k * r * k.transpose();
  EXPECT_LT(max_abs(kalman_update(f, p) - joseph), 1e-10 * max_abs(joseph));
}

TEST(CompareProposals, ScalarUnitModel) {
  const auto f = OneStepFilter::scalar_identity(1, 1, 1, 1, 1, 1);
  const auto c = compare_proposals(f, VectorXd::Zero(1), 0, 1);
  EXPECT_NEAR(c.log_rho_st, std::log(3.0 / std::sqrt(5.0)), 1e-14);
  EXPECT_NEAR(c.log_rho_op, std::log(1.5 / std::sqrt(2.0)), 1e-14);
  EXPECT_TRUE(c.st_exceeds_op);
  EXPECT_FALSE(c.mc_st.has_value());
}

TEST(CompareProposals, SilentObservation) {
  const MatrixXd i = MatrixXd::Identity(2, 2);
  const auto f = OneStepFilter::dense(i, MatrixXd::Zero(2, 2), i, i, i);
  const auto c = compare_proposals(f, VectorXd::Ones(2), 1000, 3);
  EXPECT_NEAR(c.log_rho_st, 0.0, 1e-15);
  EXPECT_NEAR(c.log_rho_op, 0.0, 1e-15);
  ASSERT_TRUE(c.mc_st.has_value());
  EXPECT_NEAR(c.mc_st->ess, 1000.0, 1e-8);
  EXPECT_NEAR(c.mc_op->ess, 1000.0, 1e-8);
  EXPECT_NEAR(c.mc_st->rho.rho, 1.0, 1e-12);
}

TEST(CompareProposals, DenseMatchesScalarPath) {
  const auto s = OneStepFilter::scalar_identity(0.9, 1.1, 0.6, 0.8, 0.5, 2);
  const auto d = OneStepFilter::dense(s.M(), s.H(), s.P(), s.Q(), s.R());
  VectorXd y(2);
  y << 0.4, -1.2;
  const auto a = compare_proposals(s, y, 0, 1);
  const auto b = compare_proposals(d, y, 0, 1);
  EXPECT_NEAR(a.log_rho_st, b.log_rho_st, 1e-10);
  EXPECT_NEAR(a.log_rho_op, b.log_rho_op, 1e-10);
}

TEST(CompareProposals, MonteCarloAgreesWithClosedForm) {
  const auto f = OneStepFilter::scalar_identity(1, 1, 1, 1, 1, 2);
  VectorXd y(2);
  y << 0.3, -0.5;
  const auto c = compare_proposals(f, y, 1'000'000, 17);
  EXPECT_NEAR(c.mc_st->rho.rho, std::exp(c.log_rho_st), 3.0 * c.mc_st->rho.std_error);
  EXPECT_NEAR(c.mc_op->rho.rho, std::exp(c.log_rho_op), 3.0 * c.mc_op->rho.std_error);
  EXPECT_GT(c.mc_op->ess, c.mc_st->ess);
}

TEST(CompareProposals, SmallNoiseTrend) {
  const auto base = OneStepFilter::scalar_identity(1, 1, 1, 1, 1e-4, 3);
  const auto f = base.with_p(stationary_covariance(base));
  const auto c = compare_proposals(f, VectorXd::Zero(3), 0, 1);
  EXPECT_NEAR(c.log_rho_st / std::log(1e4), 1.5, 0.15);
  EXPECT_LT(c.log_rho_op, 0.1);
}

TEST(SweepTables34, StationarySmallNoise) {
  FilterGrid grid;
  grid.r = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const auto report = sweep_tables34(grid, 42);
  EXPECT_NEAR(report.fit("log_rho_st").fit.slope, 1.5, 0.15);
  EXPECT_NEAR(report.fit("log_rho_op").fit.slope, 0.0, 0.05);
  EXPECT_NEAR(report.fit("log_p").fit.slope, 1.0, 0.05);
}

TEST(SweepTables34, FixedPriorJointNoise) {
  FilterGrid grid;
  grid.init = Initialization::fixed_p;
  grid.driver = FilterDriver::r_equals_q;
  grid.d_fixed = 2;
  grid.r = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const auto report = sweep_tables34(grid, 42);
  EXPECT_NEAR(report.fit("log_rho_st").fit.slope, 1.0, 0.1);
  EXPECT_NEAR(report.fit("log_rho_op").fit.slope, 1.0, 0.1);
}

TEST(SweepTables34, LargeDimension) {
  FilterGrid grid;
  grid.driver = FilterDriver::d;
  grid.init = Initialization::fixed_p;
  grid.d = {4, 8, 16, 32, 64};
  const auto report = sweep_tables34(grid, 42);
  EXPECT_GE(report.fit("log_rho_st").fit.r2, 0.95);
  EXPECT_GE(report.fit("log_rho_op").fit.r2, 0.95);
  EXPECT_NEAR(report.fit("tau_st").fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(report.fit("tau_op").fit.slope, 0.5, 1e-12);
}

TEST(SweepTables34, Validation) {
  FilterGrid grid;
  grid.r = {1e-2, 1e-3};
  EXPECT_THROW(sweep_tables34(grid, 1), FitError);
  EXPECT_EQ(initialization_from_string(to_string(Initialization::fixed_p)), Initialization::fixed_p);
  EXPECT_EQ(filter_driver_from_string(to_string(FilterDriver::r_equals_q)), FilterDriver::r_equals_q);
  EXPECT_THROW(filter_driver_from_string("q"), InvalidArgument);
}

TEST(Truncation, IdentityDynamicsSeparatesProposals) {
  const auto verdicts = truncation_verdicts(identity_dynamics_family([](std::size_t j) {
                                              return 1.0 / (static_cast<double>(j) * static_cast<double>(j));
                                            }),
                                            4096);
  for (const auto& v : verdicts) {
    const bool optimal = v.quantity.find("_op") != std::string::npos;
    EXPECT_EQ(v.converged, optimal) << v.quantity;
  }
}

TEST(Truncation, SummableObservationNoiseAgrees) {
  DiagonalFilterFamily fam = identity_dynamics_family([](std::size_t j) { return std::pow(j, -2.0); });
  fam.q = [](std::size_t j) { return std::pow(static_cast<double>(j), -2.0); };
  for (const auto& v : truncation_verdicts(fam, 4096)) {
    EXPECT_TRUE(v.converged) << v.quantity;
  }
  DiagonalFilterFamily rough = identity_dynamics_family([](std::size_t) { return 1.0; });
  rough.q = fam.q;
  for (const auto& v : truncation_verdicts(rough, 4096)) {
    EXPECT_FALSE(v.converged) << v.quantity;
  }
}

}  // namespace
}  // namespace isdim::filter

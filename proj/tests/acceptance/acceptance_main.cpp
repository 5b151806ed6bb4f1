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
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <isdim/errors.hpp>
#include <isdim/filter.hpp>
#include <isdim/inverse.hpp>
#include <isdim/measures.hpp>
#include <isdim/numerics.hpp>
#include <isdim/parallel.hpp>
#include <isdim/random.hpp>
#include <isdim/sampler.hpp>
#include <isdim_cli/commands.hpp>
#include <oracles.hpp>

namespace {

using namespace isdim;
using isdim::testing::gaussian_log_rho;
using isdim::testing::random_matrix;
using isdim::testing::random_spd;
using isdim::testing::random_vector;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 4) {
      failures_.push_back(what);
    }
    ok_ = ok_ && ok;
  }
  void note(const std::string& what) { notes_.push_back(what); }
  [[nodiscard]] Verdict verdict() const {
    std::string detail;
    for (const auto& list : {notes_, failures_}) {
      for (const auto& s : list) {
        detail += (detail.empty() ? "" : "; ") + s;
      }
    }
    return {ok_, detail};
  }

 private:
  bool ok_ = true;
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Verdict rho_divergence_identity() {
  Checks c;
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> var(0.5, 2.0);
  std::uniform_real_distribution<double> ratio(0.2, 1.8);
  std::normal_distribution<double> mean;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 8);
    VectorXd mt(d), vt(d), mp(d), vp(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      vp(j) = var(rng);
      vt(j) = vp(j) * ratio(rng);
      mp(j) = 0.5 * mean(rng);
      mt(j) = 0.5 * mean(rng);
    }
    const measures::DiagonalGaussian target(mt, vt);
    const measures::DiagonalGaussian proposal(mp, vp);
    const double log_rho = measures::log_rho(target, proposal);
    const double chi2 = measures::chi2_divergence(target, proposal);
    const double kl = measures::kl_divergence(target, proposal);
    const double oracle = gaussian_log_rho(mt, vt.asDiagonal().toDenseMatrix(), mp, vp.asDiagonal().toDenseMatrix());
    worst = std::max({worst, rel(1.0 + chi2, std::exp(log_rho)), rel(std::exp(log_rho), std::exp(oracle))});
    c.expect(rel(1.0 + chi2, std::exp(log_rho)) <= 1e-8, "1 + chi2 differs from rho on instance " + std::to_string(k));
    c.expect(rel(std::exp(log_rho), std::exp(oracle)) <= 1e-8, "rho differs from oracle on instance " + std::to_string(k));
    c.expect(kl <= log_rho * (1.0 + 1e-12) + 1e-15, "exp(KL) > rho on instance " + std::to_string(k));
  }
  c.note("worst relative error " + num(worst));
  return c.verdict();
}

Verdict bias_mse_bounds() {
  Checks c;
  int violations = 0;
  int checks = 0;
  std::uint64_t stream = 0;
  for (double shift : {0.5, 1.0}) {
    const auto model = sampler::gaussian_shift_model(shift);
    const auto tests = sampler::bounded_test_family(shift);
    for (std::size_t n : {10, 100, 1000}) {
      const auto reports = sampler::bias_mse_experiment(model, tests, n, 10'000, derive_seed(2002, stream++));
      for (const auto& r : reports) {
        checks += 2;
        if (!r.mse_within_bound()) {
          ++violations;
          c.expect(false, "MSE bound violated: m=" + num(shift) + " N=" + std::to_string(n) + " " + r.test_name);
        }
        if (!r.bias_within_bound()) {
          ++violations;
          c.expect(false, "bias bound violated: m=" + num(shift) + " N=" + std::to_string(n) + " " + r.test_name);
        }
      }
    }
  }
  c.note(std::to_string(violations) + " violations in " + std::to_string(checks) + " checks");
  return c.verdict();
}

Verdict ess_consistency() {
  Checks c;
  const auto model = sampler::gaussian_shift_model(1.0);
  const std::size_t n = 100'000;
  const double ratio = sampler::ess(sampler::weigh(model.draw, model.log_g, n, 3003)) * std::exp(1.0) /
                       static_cast<double>(n);
  const double deviation = sampler::ess_rho_consistency(model, n, 3003);
  c.note("ess*rho/N = " + num(ratio));
  c.expect(ratio >= 0.95 && ratio <= 1.05, "outside [0.95, 1.05]");
  c.expect(std::abs(deviation - std::abs(ratio - 1.0)) <= 1e-12, "reported deviation inconsistent");
  return c.verdict();
}

Verdict product_collapse() {
  Checks c;
  sampler::CollapseOptions opt;
  opt.n = 1'000'000;
  opt.seed = 4004;
  const auto rows = sampler::product_collapse_sweep(std::numbers::e, {1, 2, 3, 10, 50}, opt);
  for (const auto& row : rows) {
    c.expect(rel(row.log_rho_exact, static_cast<double>(row.d)) <= 4.0 * std::numeric_limits<double>::epsilon(),
             "exact column off at d=" + std::to_string(row.d));
  }
  const auto& mc = rows[2].mc;
  const double target = std::exp(3.0);
  c.note("MC rho at d=3: " + num(mc->rho) + " +/- " + num(mc->std_error) + " vs e^3 = " + num(target));
  c.expect(rel(mc->rho, target) <= 0.05, "MC rho at d=3 is " + num(100.0 * rel(mc->rho, target)) + "% from e^3");
  return c.verdict();
}

Verdict singular_limit() {
  Checks c;
  const auto potential = measures::ScalarPotential::quadratic(1.0);
  const auto proposal = measures::DiagonalGaussian::standard(1);
  const auto report = sampler::singular_limit_sweep(potential, proposal, {1e-1, 1e-2, 1e-3, 1e-4}, 1'000'000, 5005);
  const double slope = report.reference_fit->slope;
  c.note("exact slope " + num(slope));
  c.expect(std::abs(slope - 0.5) <= 0.05, "slope outside 0.5 +/- 0.05");
  const auto& row = report.rows[1];
  const double exact = std::exp(row.reference_log_rho);
  c.note("MC at eps=1e-2: " + num(row.mc.rho) + " +/- " + num(row.mc.std_error) + " vs " + num(exact));
  c.expect(std::abs(row.mc.rho - exact) <= 3.0 * row.mc.std_error, "MC outside 3 SE at eps=1e-2");
  return c.verdict();
}

Verdict trace_identities() {
  Checks c;
  std::mt19937_64 rng(6006);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index du = 1 + static_cast<Eigen::Index>(rng() % 30);
    const Eigen::Index dy = 1 + static_cast<Eigen::Index>(rng() % 30);
    const MatrixXd sigma = random_spd(rng, du);
    const auto ip = inverse::LinearGaussianIP::dense(random_matrix(rng, dy, du), sigma, random_spd(rng, dy));
    const auto dims = inverse::intrinsic_dims(inverse::operator_a(ip));
    const auto post = std::get<measures::DenseGaussian>(inverse::posterior(ip, random_vector(rng, dy)));
    const MatrixXd& cov = post.covariance();
    const MatrixXd sigma_inv = sigma.inverse();
    const double tau = ((cov.inverse() - sigma_inv) * sigma).trace();
    const double efd = ((sigma - cov) * sigma_inv).trace();
    worst = std::max({worst, rel(tau, dims.tau), rel(efd, dims.efd)});
    c.expect(rel(tau, dims.tau) <= 1e-10, "tau identity off on instance " + std::to_string(k));
    c.expect(rel(efd, dims.efd) <= 1e-10, "efd identity off on instance " + std::to_string(k));
    const double norm = 1.0 + dims.a_spectrum.maxCoeff();
    c.expect(dims.tau / norm <= dims.efd * (1.0 + 1e-12) && dims.efd <= dims.tau * (1.0 + 1e-12),
             "sandwich bound fails on instance " + std::to_string(k));
  }
  c.note("worst relative error " + num(worst));
  return c.verdict();
}

Verdict closed_form_oracle() {
  Checks c;
  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> pos(0.3, 1.5);
  std::normal_distribution<double> normal;
  double worst_z = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index d = 1 + k % 3;
    VectorXd kd(d), sd(d), gd(d), y(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      kd(j) = pos(rng);
      sd(j) = pos(rng);
      gd(j) = pos(rng);
      y(j) = normal(rng);
    }
    const auto ip = inverse::LinearGaussianIP::diagonal(kd, sd, gd);
    const auto w = inverse::whiten(ip, y);
    const double exact = std::exp(inverse::rho_closed_form_diag(w.lambda, w.z));
    const auto prior = ip.prior();
    const sampler::ProposalSampler draw = [&prior](std::size_t n, std::uint64_t seed) {
      return measures::sample(prior, n, seed);
    };
    const auto est = sampler::rho_mc(draw, inverse::log_density(ip, y), 1'000'000, derive_seed(7007, k));
    const double z = std::abs(est.rho - exact) / est.std_error;
    worst_z = std::max(worst_z, z);
    c.expect(z <= 3.0, "instance " + std::to_string(k) + " off by " + num(z) + " SE");
  }
  c.note("largest deviation " + num(worst_z) + " SE");
  return c.verdict();
}

Verdict table1() {
  Checks c;
  inverse::Table1Grid a;
  a.beta_fixed = 1.0;
  a.d_fixed = 4;
  a.gamma = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const double slope = inverse::sweep_table1(inverse::Regime::small_noise_fixed_d, a, 8008).fit("log_rho").fit.slope;
  c.note("(a) slope " + num(slope));
  c.expect(std::abs(slope - 2.0) <= 0.2, "(a) slope outside 2 +/- 10%");

  inverse::Table1Grid b;
  b.beta_fixed = 0.5;
  b.d = {128, 256, 512, 1024, 2048};
  b.data_seeds = 32;
  const double r2 = inverse::sweep_table1(inverse::Regime::large_d, b, 8008).fit("log_rho").fit.r2;
  c.note("(b) R2 " + num(r2));
  c.expect(r2 >= 0.95, "(b) R2 below 0.95");

  inverse::Table1Grid g;
  g.beta = {1.05, 1.1, 1.2, 1.3, 1.4, 1.5};
  g.d_max = 16384;
  g.data_seeds = 32;
  const auto report = inverse::sweep_table1(inverse::Regime::regularity, g, 8008);
  const double exponent = report.fit("log_tau").fit.slope;
  c.note("(c) log tau exponent " + num(exponent));
  c.expect(std::abs(exponent - 1.0) <= 0.15, "(c) exponent outside 1 +/- 15%");
  const auto& nearest = report.rows.front();
  const double ratio = nearest.tau * (nearest.beta - 1.0);
  c.note("(c) tau (beta-1) = " + num(ratio) + " at beta " + num(nearest.beta));
  c.expect(std::abs(ratio - 1.0) <= 0.15, "(c) tau (beta-1) outside 1 +/- 15% at the smallest beta");
  return c.verdict();
}

Verdict filtering_identities() {
  Checks c;
  std::mt19937_64 rng(9009);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 6);
    const MatrixXd i = MatrixXd::Identity(n, n);
    const MatrixXd p = random_spd(rng, n, 0.01, 5.0);
    const auto ops = filter::a_operators(filter::OneStepFilter::dense(i, i, p, i, i));
    const double e = std::max((ops.a_st.matrix - (p + i)).cwiseAbs().maxCoeff(),
                              (ops.a_op.matrix - p / 2.0).cwiseAbs().maxCoeff());
    worst = std::max(worst, e);
    c.expect(e <= 1e-12, "worked example off by " + num(e));
  }
  double worst_reduction = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 5);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 5);
    const auto f = filter::OneStepFilter::dense(random_matrix(rng, n, n), random_matrix(rng, m, n), random_spd(rng, n),
                                                random_spd(rng, n), random_spd(rng, m));
    const auto ops = filter::a_operators(f);
    c.expect(ops.dims_op.tau <= ops.dims_st.tau * (1.0 + 1e-12) + 1e-14, "tau_op > tau_st on model " + std::to_string(k));
    const auto st = inverse::intrinsic_dims(inverse::operator_a(filter::standard_reduction(f)));
    const auto op = inverse::intrinsic_dims(inverse::operator_a(filter::optimal_reduction(f)));
    const double e = std::max({rel(ops.dims_st.tau, st.tau), rel(ops.dims_st.efd, st.efd),
                               std::abs(ops.dims_op.tau - op.tau) / std::max(op.tau, 1e-12),
                               std::abs(ops.dims_op.efd - op.efd) / std::max(op.efd, 1e-12)});
    worst_reduction = std::max(worst_reduction, e);
    c.expect(e <= 1e-10, "reduction mismatch on model " + std::to_string(k));
  }
  c.note("example error " + num(worst) + ", reduction error " + num(worst_reduction));
  return c.verdict();
}

Verdict steady_state() {
  Checks c;
  double worst = 0.0;
  for (double q : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    for (double r : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      const auto f = filter::OneStepFilter::scalar_identity(1, 1, 1, q, r, 1);
      const double p = filter::stationary_covariance(f);
      const double e = rel(filter::kalman_update(f, p), p);
      worst = std::max(worst, e);
      c.expect(e <= 1e-10, "fixed point off at q=" + num(q) + " r=" + num(r));
    }
  }
  std::vector<double> x;
  std::vector<double> y;
  for (double r : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    x.push_back(std::log(r));
    y.push_back(std::log(filter::stationary_covariance(filter::OneStepFilter::scalar_identity(1, 1, 1, 1, r, 1))));
  }
  const double slope = fit_line(x, y).slope;
  c.note("fixed-point error " + num(worst) + ", log P vs log r slope " + num(slope));
  c.expect(std::abs(slope - 1.0) <= 0.05, "P slope outside 1 +/- 0.05");
  return c.verdict();
}

Verdict tables34() {
  Checks c;
  filter::FilterGrid st;
  st.init = filter::Initialization::stationary;
  st.driver = filter::FilterDriver::r;
  st.d_fixed = 3;
  st.r = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const auto a = filter::sweep_tables34(st, 1111);
  const double s_st = a.fit("log_rho_st").fit.slope;
  const double s_op = a.fit("log_rho_op").fit.slope;
  c.note("stationary slopes " + num(s_st) + ", " + num(s_op));
  c.expect(std::abs(s_st - 1.5) <= 0.15, "stationary standard slope outside 1.5 +/- 10%");
  c.expect(std::abs(s_op) <= 0.05, "stationary optimal slope outside 0 +/- 0.05");

  filter::FilterGrid fp;
  fp.init = filter::Initialization::fixed_p;
  fp.driver = filter::FilterDriver::r_equals_q;
  fp.d_fixed = 2;
  fp.r = st.r;
  const auto b = filter::sweep_tables34(fp, 1111);
  const double f_st = b.fit("log_rho_st").fit.slope;
  const double f_op = b.fit("log_rho_op").fit.slope;
  c.note("fixed-p slopes " + num(f_st) + ", " + num(f_op));
  c.expect(std::abs(f_st - 1.0) <= 0.1 && std::abs(f_op - 1.0) <= 0.1, "fixed-p slopes outside 1 +/- 10%");

  filter::FilterGrid ld;
  ld.init = filter::Initialization::fixed_p;
  ld.driver = filter::FilterDriver::d;
  ld.d = {4, 8, 16, 32, 64};
  const auto d = filter::sweep_tables34(ld, 1111);
  const double r_st = d.fit("log_rho_st").fit.r2;
  const double r_op = d.fit("log_rho_op").fit.r2;
  c.note("large-d R2 " + num(r_st) + ", " + num(r_op));
  c.expect(r_st >= 0.95 && r_op >= 0.95, "large-d R2 below 0.95");
  return c.verdict();
}

Verdict reproducibility() {
  Checks c;
  const std::vector<std::string> configs = {
      "[run]\ncommand = diagnose\nseed = 12\n[model]\ntype = dense-ip\nK = 1, 0.5; 0, 2\nSigma = 2, 0.3; 0.3, 1\n"
      "Gamma = 0.5, 0; 0, 1\ny = 0.4, -1.2\n",
      "[run]\ncommand = verify-bounds\nseed = 12\nreplications = 1000\n[model]\ntype = gaussian-shift\n"
      "[grid]\nn = 10, 100\n",
      "[run]\ncommand = product-collapse\nseed = 12\nn_particles = 100000\n[model]\ntype = product\n"
      "[grid]\nd = 1, 2, 3, 10\n",
      "[run]\ncommand = singular-limit\nseed = 12\nn_particles = 100000\n[model]\ntype = potential\n"
      "[grid]\nepsilon = 1e-1, 1e-2, 1e-3\n",
      "[run]\ncommand = sweep-cascade\nseed = 12\n[model]\ntype = cascade\nbeta = 0.5\n"
      "[grid]\nregime = large_d\nd = 128, 256, 512, 1024\n",
      "[run]\ncommand = sweep-cascade\nseed = 12\n[model]\ntype = cascade\n"
      "[grid]\nregime = regularity\nbeta = 1.05, 1.1, 1.2\n",
      "[run]\ncommand = filter-compare\nseed = 12\nn_particles = 100000\n[model]\ntype = filter\nd = 2\n",
      "[run]\ncommand = sweep-filter\nseed = 12\n[model]\ntype = filter\nd = 3\n"
      "[grid]\ndriver = r\nr = 1e-2, 1e-3, 1e-4\n",
      "[run]\ncommand = sweep-filter\nseed = 12\n[model]\ntype = filter\n[grid]\ndriver = truncation\nd = 256\n",
  };
  const std::size_t saved = default_threads();
  int identical = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    set_default_threads(1);
    const std::string first = cli::run_to_string(configs[i]);
    const std::string again = cli::run_to_string(configs[i]);
    set_default_threads(4);
    const std::string wide = cli::run_to_string(configs[i]);
    const bool same = first == again && first == wide && !first.empty();
    identical += same ? 1 : 0;
    c.expect(same, "config " + std::to_string(i) + " output differs between reruns");
  }
  set_default_threads(saved);
  c.note(std::to_string(identical) + "/" + std::to_string(configs.size()) + " configs byte-identical across reruns");
  return c.verdict();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"rho equals 1 + chi2 and bounds exp(KL)", rho_divergence_identity},
      {"bias and MSE bounds", bias_mse_bounds},
      {"ess consistency", ess_consistency},
      {"product collapse", product_collapse},
      {"singular limit", singular_limit},
      {"trace identities and sandwich bounds", trace_identities},
      {"closed-form rho against Monte Carlo", closed_form_oracle},
      {"spectral cascade scalings", table1},
      {"filtering identities", filtering_identities},
      {"steady-state covariance", steady_state},
      {"filter scalings", tables34},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += v.pass ? 0 : 1;
    std::printf("%s criterion %zu: %s (%.1f s) -- %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

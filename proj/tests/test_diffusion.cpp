#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/rng.hpp"
#include "cmlab/diffusion/dsm.hpp"
#include "cmlab/diffusion/estimator.hpp"
#include "cmlab/diffusion/mixture.hpp"
#include "cmlab/diffusion/solvers.hpp"
#include "cmlab/diffusion/time_grid.hpp"
#include "cmlab/eval/dataset.hpp"

using namespace cmlab;

namespace {

ScoreField zero_score(int dim) { return ScoreField::constant_drift(Vec(dim, 0.0)); }

}  // namespace

TEST_CASE("karras_grid: endpoints and interior boundary match the power formula") {
  const TimeGrid g = karras_grid(0.002, 80.0, 7.0, 18);
  CHECK(g.boundaries.front() == 0.002);
  CHECK(g.boundaries.back() == 80.0);

  const double lo = std::pow(0.002, 1.0 / 7.0);
  const double hi = std::pow(80.0, 1.0 / 7.0);
  const double t2 = std::pow(lo + (1.0 / 17.0) * (hi - lo), 7.0);
  CHECK(g.boundaries[1] == doctest::Approx(t2).epsilon(1e-15));

  for (int i = 0; i + 1 < g.steps; ++i) CHECK(g.boundaries[i] < g.boundaries[i + 1]);

  const TimeGrid again = karras_grid(0.002, 80.0, 7.0, 18);
  for (int i = 0; i < g.steps; ++i) CHECK(g.boundaries[i] == again.boundaries[i]);
}

TEST_CASE("karras_grid: precondition violations are input errors") {
  CHECK_THROWS_AS(karras_grid(0.0, 80.0, 7.0, 18), input_error);
  CHECK_THROWS_AS(karras_grid(1.0, 0.5, 7.0, 18), input_error);
  CHECK_THROWS_AS(karras_grid(0.002, 80.0, 7.0, 1), input_error);
  CHECK_THROWS_AS(karras_grid(0.002, 80.0, 0.5, 18), input_error);
}

TEST_CASE("perturb: zero noise and zero center") {
  const Vec x{1.0, -2.0, 3.0};
  const Vec zero(3, 0.0);
  const Vec y = perturb(x, 4.2, zero);
  for (int i = 0; i < 3; ++i) CHECK(y[i] == x[i]);

  const Vec z{0.5, 0.1, -0.7};
  const Vec w = perturb(zero, 1.0, z);
  for (int i = 0; i < 3; ++i) CHECK(w[i] == z[i]);
}

TEST_CASE("perturb: empirical covariance is t^2 I (Monte Carlo oracle)") {
  constexpr long kDraws = 100000;
  const double t = 1.7;
  const Vec x{0.3, -0.4};
  RandomStream rng(12);
  double c00 = 0.0, c01 = 0.0, c11 = 0.0;
  Vec z(2);
  for (long i = 0; i < kDraws; ++i) {
    rng.fill_normal(z.data(), 2);
    const Vec y = perturb(x, t, z);
    const double d0 = y[0] - x[0];
    const double d1 = y[1] - x[1];
    c00 += d0 * d0;
    c01 += d0 * d1;
    c11 += d1 * d1;
  }
  const double tol = 3.0 / std::sqrt(static_cast<double>(kDraws));
  CHECK(std::fabs(c00 / kDraws / (t * t) - 1.0) < tol * std::sqrt(2.0));
  CHECK(std::fabs(c11 / kDraws / (t * t) - 1.0) < tol * std::sqrt(2.0));
  CHECK(std::fabs(c01 / kDraws / (t * t)) < tol);
}

TEST_CASE("mixture_score: single component is the Gaussian score") {
  const GaussianMixture gm = GaussianMixture::single({0.5, -1.0}, 0.36);
  const Vec x{1.2, 0.3};
  const double t = 2.0;
  const Vec s = gm.score(x, t);
  for (int i = 0; i < 2; ++i)
    CHECK(s[i] == doctest::Approx(-(x[i] - gm.means[0][i]) / (0.36 + t * t)).epsilon(1e-14));
}

TEST_CASE("mixture_score: symmetric two-component mixture has zero score at the midpoint") {
  const GaussianMixture gm = GaussianMixture::symmetric_pair(0.8, 0.25, 2);
  const Vec s = gm.score(Vec{0.0, 0.0}, 1.3);
  for (double v : s) CHECK(std::fabs(v) < 1e-14);
}

TEST_CASE("mixture_score: matches finite differences of log density") {
  GaussianMixture gm;
  gm.weights = {0.2, 0.5, 0.3};
  gm.means = {{1.0, 0.0}, {-0.5, 0.8}, {0.2, -1.1}};
  gm.variances = {0.2, 0.5, 0.9};
  gm.validate();

  RandomStream rng(7);
  for (double t : {0.002, 0.3, 4.0, 80.0}) {
    for (int rep = 0; rep < 8; ++rep) {
      Vec x{3.0 * rng.normal(), 3.0 * rng.normal()};
      const Vec s = gm.score(x, t);
      const double h = 1e-5 * std::max(1.0, t);
      for (int d = 0; d < 2; ++d) {
        Vec xp = x, xm = x;
        xp[d] += h;
        xm[d] -= h;
        const double fd = (gm.log_density(xp, t) - gm.log_density(xm, t)) / (2.0 * h);
        CHECK(std::fabs(s[d] - fd) / std::max(1e-8, std::fabs(s[d])) < 1e-6);
      }
    }
  }
}

TEST_CASE("mixture_score: posterior-mean identity holds") {
  const GaussianMixture gm = GaussianMixture::symmetric_pair(0.8, 0.36, 2);
  RandomStream rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const Vec x{2.0 * rng.normal(), 2.0 * rng.normal()};
    const double t = 0.1 + 3.0 * rng.uniform();
    const Vec s = gm.score(x, t);
    const Vec pm = gm.posterior_mean(x, t);
    for (int d = 0; d < 2; ++d)
      CHECK(s[d] == doctest::Approx((pm[d] - x[d]) / (t * t)).epsilon(1e-10));
  }
}

TEST_CASE("lemma1_estimate: M=1 degenerates to the single-draw value") {
  const GaussianMixture gm = GaussianMixture::single({0.2}, 1.0);
  const Vec x_t{0.9};
  const double t = 1.0;
  RandomStream draw_clone(55);
  const Vec x = gm.sample(draw_clone);

  RandomStream rng(55);
  const Vec est = lemma1_estimate(gm, x_t, t, 1, rng);
  CHECK(est[0] == doctest::Approx(-(x_t[0] - x[0]) / (t * t)).epsilon(1e-14));
}

TEST_CASE("lemma1_estimate: single-Gaussian error within 5 sigma_posterior / sqrt(M)") {
  const double sd2 = 1.0;  // data variance
  const double t = 1.0;
  const GaussianMixture gm = GaussianMixture::single({0.3}, sd2);
  const Vec x_t{1.1};
  const Vec truth = gm.score(x_t, t);

  constexpr long kM = 10000;
  const double sigma_post = std::sqrt(sd2 * t * t / (sd2 + t * t));
  const double bound = 5.0 * sigma_post / std::sqrt(static_cast<double>(kM));

  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    RandomStream rng(100 + seed);
    const Vec est = lemma1_estimate(gm, x_t, t, kM, rng);
    worst = std::max(worst, std::fabs(est[0] - truth[0]));
  }
  CHECK(worst < bound);
}

TEST_CASE("score_estimator_check: error decays like 1/sqrt(M)") {
  const GaussianMixture gm = GaussianMixture::symmetric_pair(0.8, 0.36, 2);
  const std::vector<long> counts = {100, 1000, 10000, 100000};
  const EstimatorReport report = score_estimator_check(gm, 1.0, counts, 4, 4, 2024);
  CHECK(std::fabs(report.slope + 0.5) <= 0.15);
}

TEST_CASE("euler_step: zero score and zero interval are identities") {
  const ScoreField zero = zero_score(2);
  const Vec x{0.7, -0.2};
  const Vec a = euler_step(zero, x, 3.0, 1.0);
  for (int i = 0; i < 2; ++i) CHECK(a[i] == x[i]);

  const ScoreField gauss = ScoreField::analytic(GaussianMixture::single({0.0, 0.0}, 1.0));
  const Vec b = euler_step(gauss, x, 3.0, 3.0);
  for (int i = 0; i < 2; ++i) CHECK(b[i] == x[i]);
}

TEST_CASE("euler_step: single-Gaussian step matches the hand-evaluated update") {
  const Vec m{0.4, -0.6};
  const double sd2 = 0.5;
  const ScoreField score = ScoreField::analytic(GaussianMixture::single(m, sd2));
  const Vec x{1.0, 2.0};
  const double t_from = 2.5, t_to = 1.5;
  const Vec got = euler_step(score, x, t_from, t_to);
  for (int i = 0; i < 2; ++i) {
    const double expect =
        x[i] + (t_to - t_from) * t_from * (x[i] - m[i]) / (sd2 + t_from * t_from);
    CHECK(got[i] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("heun_step: zero score is the identity; constant drift equals Euler exactly") {
  const ScoreField zero = zero_score(2);
  const Vec x{0.1, 0.9};
  const Vec a = heun_step(zero, x, 4.0, 2.0);
  for (int i = 0; i < 2; ++i) CHECK(a[i] == x[i]);

  const ScoreField drift = ScoreField::constant_drift({0.3, -1.1});
  const Vec e = euler_step(drift, x, 4.0, 2.0);
  const Vec h = heun_step(drift, x, 4.0, 2.0);
  for (int i = 0; i < 2; ++i) CHECK(h[i] == doctest::Approx(e[i]).epsilon(1e-14));
}

TEST_CASE("solve_pf_ode: fine Heun endpoint matches the closed-form Gaussian flow") {
  const Vec m{0.2, -0.3};
  const double sd2 = 1.0;
  const ScoreField score = ScoreField::analytic(GaussianMixture::single(m, sd2));
  const TimeGrid grid = karras_grid(0.002, 80.0, 7.0, 640);

  RandomStream rng(5);
  for (int rep = 0; rep < 4; ++rep) {
    Vec x(2);
    rng.fill_normal(x.data(), 2);
    for (double& v : x) v *= 80.0;
    const Vec end = solve_pf_ode(score, grid, x, SolverKind::heun).back();
    const Vec exact = gaussian_flow(x, 80.0, 0.002, m, sd2);
    CHECK(norm2(diff(end, exact)) < 1e-4);
  }
}

TEST_CASE("solve_pf_ode: N=2 with zero score returns the start point") {
  const ScoreField zero = zero_score(2);
  const TimeGrid grid = karras_grid(0.002, 80.0, 7.0, 2);
  const Vec x{3.0, -4.0};
  const auto traj = solve_pf_ode(zero, grid, x, SolverKind::euler);
  REQUIRE(traj.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(traj.back()[i] == x[i]);
}

TEST_CASE("solver orders: Euler ~1, Heun ~2, Heun never worse") {
  const Vec m{0.3, -0.2};
  const ScoreField score = ScoreField::analytic(GaussianMixture::single(m, 1.0));
  RandomStream rng(8);
  Batch starts(16);
  for (Vec& x : starts) {
    x.resize(2);
    rng.fill_normal(x.data(), 2);
    for (double& v : x) v *= 80.0;
  }

  const std::vector<double> ns = {10, 20, 40, 80, 160};
  std::vector<double> err_e, err_h;
  for (double nd : ns) {
    const TimeGrid grid = karras_grid(0.002, 80.0, 7.0, static_cast<int>(nd));
    double ee = 0.0, eh = 0.0;
    for (const Vec& x : starts) {
      const Vec exact = gaussian_flow(x, 80.0, 0.002, m, 1.0);
      ee += norm2(diff(solve_pf_ode(score, grid, x, SolverKind::euler).back(), exact));
      eh += norm2(diff(solve_pf_ode(score, grid, x, SolverKind::heun).back(), exact));
    }
    err_e.push_back(ee / starts.size());
    err_h.push_back(eh / starts.size());
    CHECK(err_h.back() <= err_e.back());
  }
  CHECK(std::fabs(-loglog_slope(ns, err_e) - 1.0) <= 0.2);
  CHECK(std::fabs(-loglog_slope(ns, err_h) - 2.0) <= 0.25);
}

TEST_CASE("dsm objective: frozen-zero score gives loss equal to the data dimension") {
  const TimeGrid grid = karras_grid(0.002, 80.0, 7.0, 18);
  RandomStream rng(77);
  constexpr int kBatch = 4096;
  const Vec zero(2, 0.0);
  double acc = 0.0;
  for (int i = 0; i < kBatch; ++i) {
    const long n = rng.uniform_int(0, grid.steps - 1);
    const Vec z{rng.normal(), rng.normal()};
    acc += dsm_objective_term(zero, grid.boundaries[n], z);
  }
  CHECK(acc / kBatch == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("dsm loss: residual form equals the objective form for random fields") {
  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {8};
  cfg.precondition_input = true;
  LearnedScore score{MlpNet(cfg), 0.7};
  score.net.init_dense(13);

  const TimeGrid grid = karras_grid(0.002, 80.0, 7.0, 18);
  RandomStream rng(14);
  Batch x_clean(32), z(32);
  std::vector<double> t_levels(32);
  double expect = 0.0;
  for (int i = 0; i < 32; ++i) {
    x_clean[i] = {rng.normal(), rng.normal()};
    t_levels[i] = grid.boundaries[rng.uniform_int(0, grid.steps - 1)];
    z[i] = {rng.normal(), rng.normal()};
    const Vec x_t = perturb(x_clean[i], t_levels[i], z[i]);
    expect += dsm_objective_term(score.eval(x_t, t_levels[i]), t_levels[i], z[i]);
  }
  expect /= 32.0;
  const double got =
      dsm_loss_batch(score, score.net.params().values, x_clean, t_levels, z, nullptr);
  CHECK(got == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("dsm_train: learned score approaches the analytic score in the bulk") {
  const Vec m{0.25, -0.4};
  const double sd2 = 1.0;
  const GaussianMixture gm = GaussianMixture::single(m, sd2);
  const Dataset data = Dataset::gaussian(gm);
  const TimeGrid grid = karras_grid(0.002, 80.0, 7.0, 18);

  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {64, 64};
  cfg.precondition_input = true;
  cfg.sigma_ref = 1.0;
  DsmConfig train;
  train.steps = 12000;
  train.seed = 3;
  const DsmResult result = dsm_train(cfg, 1.0, data.sampler(), 2, grid, train);

  // Pointwise relative error, averaged over a bulk lattice (the exact mean,
  // where the score vanishes, is excluded).
  double err_sum = 0.0;
  int count = 0;
  for (double t : {0.05, 0.5, 2.0, 8.0, 30.0}) {
    for (int i = -2; i <= 2; ++i) {
      for (int j = -2; j <= 2; ++j) {
        if (i == 0 && j == 0) continue;
        Vec x{m[0] + 0.9 * i, m[1] + 0.9 * j};
        const Vec approx = result.field.eval(x, t);
        const Vec truth = gm.score(x, t);
        err_sum += norm2(diff(approx, truth)) / norm2(truth);
        ++count;
      }
    }
  }
  CHECK(err_sum / count < 0.1);
}

TEST_CASE("dsm_train: seed-fixed run has decreasing loss moving averages") {
  // Fixture run: sigma_data deliberately mismatched to the data std so the
  // denoiser cannot start at the loss floor and real descent is visible.
  const GaussianMixture gm = GaussianMixture::single({0.25, -0.4}, 1.0);
  const Dataset data = Dataset::gaussian(gm);
  const TimeGrid grid = karras_grid(0.002, 80.0, 7.0, 18);
  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {32, 32};
  cfg.precondition_input = true;
  cfg.sigma_ref = 0.3;
  DsmConfig train;
  train.steps = 2000;
  train.seed = 3;
  const DsmResult result = dsm_train(cfg, 0.3, data.sampler(), 2, grid, train);
  auto ma = [&](std::size_t k) {
    double acc = 0.0;
    for (std::size_t i = k; i < k + 100; ++i) acc += result.loss_log[i];
    return acc / 100.0;
  };
  CHECK(ma(0) > ma(200));
  CHECK(ma(200) > ma(400));
  CHECK(ma(400) > ma(800));
  CHECK(ma(800) > ma(1900));
}

TEST_CASE("solve_pf_ode: non-finite state reports the step index") {
  // A huge constant drift blows the state up to inf within a few steps.
  const ScoreField drift = ScoreField::constant_drift({1e308, 0.0});
  const TimeGrid grid = karras_grid(0.002, 80.0, 7.0, 6);
  const Vec x{0.0, 0.0};
  CHECK_THROWS_AS(solve_pf_ode(drift, grid, x, SolverKind::euler), numeric_error);
}

#include "cmlab/run/verify.hpp"

#include <chrono>
#include <cmath>

#include "cmlab/consistency/loss.hpp"
#include "cmlab/consistency/model.hpp"
#include "cmlab/consistency/train.hpp"
#include "cmlab/core/errors.hpp"
#include "cmlab/core/parallel.hpp"
#include "cmlab/core/rng.hpp"
#include "cmlab/ctinf/continuous.hpp"
#include "cmlab/diffusion/estimator.hpp"
#include "cmlab/diffusion/mixture.hpp"
#include "cmlab/diffusion/solvers.hpp"
#include "cmlab/eval/dataset.hpp"

namespace cmlab {

namespace {

constexpr double kEps = 0.002;
constexpr double kHorizon = 80.0;
constexpr double kRho = 7.0;

// Two-component 2-D mixture normalized to unit per-coordinate std:
// modes at +-(0.8, 0.8), component variance 0.36, so 0.8^2 + 0.36 = 1.
GaussianMixture standard_mixture() { return GaussianMixture::symmetric_pair(0.8, 0.36, 2); }

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// boundary: f(x, eps) = x bit-exactly for random nets and random inputs.

CheckResult check_boundary(std::uint64_t seed) {
  CheckResult result{"boundary", true, 0.0, {}};
  RandomStream rng(seed);
  constexpr int kModels = 10;
  constexpr int kPoints = 1000;  // 10^4 evaluations total
  long exact = 0;
  for (int m = 0; m < kModels; ++m) {
    const int dim = m % 2 == 0 ? 2 : 3;
    MlpConfig cfg;
    cfg.input_dim = dim;
    cfg.hidden = {32, 32};
    cfg.precondition_input = m % 3 != 0;  // boundary holds either way
    ConsistencyModel model(cfg, 0.5, kEps, kHorizon);
    model.backbone().init_dense(seed + m);  // nontrivial backbone output
    for (int p = 0; p < kPoints; ++p) {
      Vec x(dim);
      for (double& v : x) v = 4.0 * rng.normal();
      const Vec y = model.apply(x, kEps);
      bool same = true;
      for (int i = 0; i < dim; ++i) same = same && (y[i] == x[i]);
      exact += same ? 1 : 0;
    }
  }
  result.passed = exact == kModels * kPoints;
  result.details["evaluations"] = kModels * kPoints;
  result.details["bit_exact"] = exact;
  return result;
}

// ---------------------------------------------------------------------------
// solver_orders: measured global-error order on the single-Gaussian PF ODE.

CheckResult check_solver_orders(std::uint64_t seed) {
  CheckResult result{"solver_orders", true, 0.0, {}};
  const Vec mean{0.3, -0.2};
  const double variance = 1.0;
  const ScoreField score = ScoreField::analytic(GaussianMixture::single(mean, variance));

  RandomStream rng(seed);
  constexpr int kTrajectories = 64;
  Batch starts(kTrajectories);
  for (Vec& x : starts) {
    x.resize(2);
    rng.fill_normal(x.data(), 2);
    for (double& v : x) v *= kHorizon;
  }

  const std::vector<double> step_counts = {10, 20, 40, 80, 160};
  std::vector<double> err_euler, err_heun;
  for (double nd : step_counts) {
    const TimeGrid grid = karras_grid(kEps, kHorizon, kRho, static_cast<int>(nd));
    double e_euler = 0.0, e_heun = 0.0;
    for (const Vec& x : starts) {
      const Vec exact = gaussian_flow(x, kHorizon, kEps, mean, variance);
      const Vec end_e = solve_pf_ode(score, grid, x, SolverKind::euler).back();
      const Vec end_h = solve_pf_ode(score, grid, x, SolverKind::heun).back();
      e_euler += norm2(diff(end_e, exact));
      e_heun += norm2(diff(end_h, exact));
    }
    err_euler.push_back(e_euler / kTrajectories);
    err_heun.push_back(e_heun / kTrajectories);
  }

  const double order_euler = -loglog_slope(step_counts, err_euler);
  const double order_heun = -loglog_slope(step_counts, err_heun);
  bool heun_never_worse = true;
  for (std::size_t i = 0; i < step_counts.size(); ++i)
    heun_never_worse = heun_never_worse && err_heun[i] <= err_euler[i];

  result.passed = std::fabs(order_euler - 1.0) <= 0.2 && std::fabs(order_heun - 2.0) <= 0.25 &&
                  heun_never_worse;
  result.details["order_euler"] = order_euler;
  result.details["order_heun"] = order_heun;
  result.details["errors_euler"] = err_euler;
  result.details["errors_heun"] = err_heun;
  result.details["heun_never_worse"] = heun_never_worse;
  return result;
}

// ---------------------------------------------------------------------------
// lemma1: self-normalized estimator error decays like M^{-1/2}.

CheckResult check_lemma1(std::uint64_t seed) {
  CheckResult result{"lemma1", true, 0.0, {}};
  const GaussianMixture gm = standard_mixture();
  const std::vector<long> counts = {100, 1000, 10000, 100000};
  const EstimatorReport report = score_estimator_check(gm, 1.0, counts, 6, 6, seed);
  result.passed = std::fabs(report.slope + 0.5) <= 0.15;
  result.details["slope"] = report.slope;
  result.details["mean_error"] = report.mean_error;
  result.details["sample_counts"] = report.sample_counts;
  return result;
}

// ---------------------------------------------------------------------------
// cd_fidelity: CD against the exact analytic score approaches the true
// consistency function; Heun beats Euler at equal budget.

struct LatticeRef {
  Batch points;                    // x lattice
  std::vector<double> times;       // t lattice
  std::vector<Vec> values;         // f_ref, indexed [ti * points + xi]
};

// High-accuracy RK4 integration of the exact-score PF ODE down to eps;
// independent of the euler/heun production steppers.
Vec rk4_flow_to_eps(const GaussianMixture& gm, VecView x0, double t0, int substeps) {
  // Power-law substep spacing mirrors the scale of the problem near eps.
  Vec x(x0.begin(), x0.end());
  const double lo = std::pow(kEps, 1.0 / kRho);
  const double hi = std::pow(t0, 1.0 / kRho);
  auto level = [&](int i) {
    const double frac = static_cast<double>(i) / substeps;
    return std::pow(hi + frac * (lo - hi), kRho);
  };
  auto fderiv = [&](const Vec& p, double t) {
    Vec s = gm.score(p, t);
    for (double& v : s) v *= -t;
    return s;
  };
  for (int i = 0; i < substeps; ++i) {
    const double ta = level(i);
    const double tb = level(i + 1);
    const double h = tb - ta;
    const Vec k1 = fderiv(x, ta);
    Vec p2 = x;
    axpy(0.5 * h, k1, p2);
    const Vec k2 = fderiv(p2, ta + 0.5 * h);
    Vec p3 = x;
    axpy(0.5 * h, k2, p3);
    const Vec k3 = fderiv(p3, ta + 0.5 * h);
    Vec p4 = x;
    axpy(h, k3, p4);
    const Vec k4 = fderiv(p4, tb);
    for (std::size_t d = 0; d < x.size(); ++d)
      x[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
  }
  return x;
}

LatticeRef build_lattice_reference(const GaussianMixture& gm, const TimeGrid& grid) {
  LatticeRef ref;
  constexpr int kSide = 7;
  for (int i = 0; i < kSide; ++i) {
    for (int j = 0; j < kSide; ++j) {
      ref.points.push_back({-2.0 + 4.0 * i / (kSide - 1), -2.0 + 4.0 * j / (kSide - 1)});
    }
  }
  ref.times = grid.boundaries;
  ref.values.resize(ref.points.size() * ref.times.size());
  parallel_for(ref.values.size(), [&](std::size_t idx) {
    const std::size_t ti = idx / ref.points.size();
    const std::size_t xi = idx % ref.points.size();
    ref.values[idx] = rk4_flow_to_eps(gm, ref.points[xi], ref.times[ti], 320);
  });
  return ref;
}

double sup_lattice_error(const ConsistencyModel& model, VecView params, const LatticeRef& ref) {
  double worst = 0.0;
  for (std::size_t ti = 0; ti < ref.times.size(); ++ti) {
    for (std::size_t xi = 0; xi < ref.points.size(); ++xi) {
      const Vec y = model.apply_with(params, ref.points[xi], ref.times[ti]);
      worst = std::max(worst, norm2(diff(y, ref.values[ti * ref.points.size() + xi])));
    }
  }
  return worst;
}

double train_and_measure(SolverKind solver, const GaussianMixture& gm, const TimeGrid& grid,
                         const LatticeRef& ref, std::uint64_t seed) {
  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {96, 96};
  cfg.precondition_input = true;
  ConsistencyModel model(cfg, 0.5, kEps, kHorizon);
  model.backbone().init(seed);

  const ScoreField score = ScoreField::analytic(gm);
  const Dataset data = Dataset::gaussian(gm);

  CdTrainConfig train;
  train.loss.solver = solver;
  train.opt.lr = 0.012;
  train.opt.momentum = 0.9;
  train.opt.cosine_decay = true;
  train.opt.total_steps = 20000;
  train.batch = 256;
  train.mu = 0.95;
  train.seed = seed;
  const TrainResult result = train_cd(model, score, data.sampler(), grid, train, 20000);
  return sup_lattice_error(model, result.ema.online.values, ref);
}

CheckResult check_cd_fidelity(std::uint64_t seed) {
  CheckResult result{"cd_fidelity", true, 0.0, {}};
  const GaussianMixture gm = standard_mixture();
  const TimeGrid grid = karras_grid(kEps, kHorizon, kRho, 36);
  const LatticeRef ref = build_lattice_reference(gm, grid);

  const double sup_heun = train_and_measure(SolverKind::heun, gm, grid, ref, seed);
  const double sup_euler = train_and_measure(SolverKind::euler, gm, grid, ref, seed);

  const double tolerance = 0.05 * gm.data_std();
  result.passed = sup_heun <= tolerance && sup_euler >= sup_heun;
  result.details["sup_error_heun"] = sup_heun;
  result.details["sup_error_euler"] = sup_euler;
  result.details["tolerance"] = tolerance;
  result.details["data_std"] = gm.data_std();
  result.details["lattice_points"] = ref.points.size() * ref.times.size();
  return result;
}

// ---------------------------------------------------------------------------
// theorem2: |L^N_CD(Euler, exact score) - L^N_CT| under common random numbers
// decreases with N and is below 1% at N = 640.

CheckResult check_theorem2(std::uint64_t seed) {
  CheckResult result{"theorem2", true, 0.0, {}};
  const GaussianMixture gm = standard_mixture();
  const ScoreField score = ScoreField::analytic(gm);

  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {32, 32};
  cfg.precondition_input = true;
  ConsistencyModel model(cfg, 0.5, kEps, kHorizon);
  model.backbone().init_dense(seed);
  const Vec& theta = model.params().values;

  constexpr int kBatch = 4096;
  RandomStream rng(seed + 1);
  Batch xs(kBatch), zs(kBatch);
  std::vector<double> us(kBatch);
  for (int i = 0; i < kBatch; ++i) {
    xs[i] = gm.sample(rng);
    zs[i].resize(2);
    rng.fill_normal(zs[i].data(), 2);
    us[i] = rng.uniform();
  }

  const std::vector<int> step_counts = {10, 40, 160, 640};
  std::vector<double> gaps, ct_values;
  LossConfig loss;  // squared l2, lambda == 1
  for (int n_steps : step_counts) {
    const TimeGrid grid = karras_grid(kEps, kHorizon, kRho, n_steps);
    CdBatch cd;
    CtBatch ct;
    cd.x_next.resize(kBatch);
    cd.x_hat.resize(kBatch);
    cd.t_next.resize(kBatch);
    cd.t_cur.resize(kBatch);
    ct.x.resize(kBatch);
    ct.z.resize(kBatch);
    ct.n.resize(kBatch);
    for (int i = 0; i < kBatch; ++i) {
      const int n = coupled_index(us[i], n_steps);
      ct.x[i] = xs[i];
      ct.z[i] = zs[i];
      ct.n[i] = n;
      cd.t_next[i] = grid.boundaries[n];
      cd.t_cur[i] = grid.boundaries[n - 1];
      cd.x_next[i] = perturb(xs[i], cd.t_next[i], zs[i]);
      cd.x_hat[i] = euler_step(score, cd.x_next[i], cd.t_next[i], cd.t_cur[i]);
    }
    const double l_cd = cd_loss_batch(model, theta, theta, cd, loss, nullptr);
    const double l_ct = ct_loss_batch(model, theta, theta, ct, grid, loss, nullptr);
    gaps.push_back(std::fabs(l_cd - l_ct));
    ct_values.push_back(l_ct);
  }

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) monotone = monotone && gaps[i + 1] < gaps[i];
  const double final_ratio = gaps.back() / ct_values.back();
  result.passed = monotone && final_ratio < 0.01;
  result.details["gaps"] = gaps;
  result.details["ct_values"] = ct_values;
  result.details["final_ratio"] = final_ratio;
  result.details["monotone"] = monotone;
  return result;
}

// ---------------------------------------------------------------------------
// continuous_limits: Theorem 3/5/6 checks at N = 1000 with common random
// numbers over a linear reparameterization.

double cosine(VecView a, VecView b) { return dot(a, b) / (norm2(a) * norm2(b)); }

CheckResult check_continuous_limits(std::uint64_t seed) {
  CheckResult result{"continuous_limits", true, 0.0, {}};
  const GaussianMixture gm = standard_mixture();
  const ScoreField score = ScoreField::analytic(gm);
  const TimeReparam reparam{kEps, kHorizon};
  constexpr int kSteps = 1000;
  constexpr int kBatch = 2048;

  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {32, 32};
  cfg.precondition_input = true;
  ConsistencyModel model(cfg, 0.5, kEps, kHorizon);
  model.backbone().init_dense(seed);
  const Vec& theta = model.params().values;

  // Shared randomness: u is snapped onto the discrete grid so both sides
  // evaluate at identical (x_t, t).
  RandomStream rng(seed + 2);
  const TimeGrid grid = reparam_grid(reparam, kSteps);
  CtInfBatch cont;
  CdBatch cd;
  CtBatch ct;
  cont.x.resize(kBatch);
  cont.z.resize(kBatch);
  cont.u.resize(kBatch);
  cd.x_next.resize(kBatch);
  cd.x_hat.resize(kBatch);
  cd.t_next.resize(kBatch);
  cd.t_cur.resize(kBatch);
  ct.x.resize(kBatch);
  ct.z.resize(kBatch);
  ct.n.resize(kBatch);
  for (int i = 0; i < kBatch; ++i) {
    Vec x = gm.sample(rng);
    Vec z(2);
    rng.fill_normal(z.data(), 2);
    const int n = coupled_index(rng.uniform(), kSteps);
    cont.u[i] = static_cast<double>(n) / (kSteps - 1);
    cd.t_next[i] = grid.boundaries[n];
    cd.t_cur[i] = grid.boundaries[n - 1];
    cd.x_next[i] = perturb(x, cd.t_next[i], z);
    cd.x_hat[i] = euler_step(score, cd.x_next[i], cd.t_next[i], cd.t_cur[i]);
    ct.x[i] = x;
    ct.z[i] = z;
    ct.n[i] = n;
    cont.x[i] = std::move(x);
    cont.z[i] = std::move(z);
  }

  // Both sides use lambda(t) = (tau^-1)'(t), the continuous-time default.
  const double lambda_const = reparam.tau_inv_deriv();
  LossConfig loss;
  loss.solver = SolverKind::euler;
  loss.weight = [lambda_const](double) { return lambda_const; };

  // Theorem 3: (N-1)^2 L^N_CD(theta, theta) vs the continuous value.
  const double l_disc = cd_loss_batch(model, theta, theta, cd, loss, nullptr);
  const double scaled = (kSteps - 1.0) * (kSteps - 1.0) * l_disc;
  const double l_cont = cd_inf_l2(model, score, cont, reparam);
  const double rel_gap = std::fabs(scaled - l_cont) / l_cont;

  // Theorem 5: stopgrad CD gradient direction.
  Vec grad_disc_cd;
  cd_loss_batch(model, theta, theta, cd, loss, &grad_disc_cd);
  for (double& g : grad_disc_cd) g *= kSteps - 1.0;
  Vec grad_pseudo_cd;
  ModelWithParams target(model, theta);
  cd_inf_stopgrad_l2(model, theta, target, score, cont, reparam, {}, &grad_pseudo_cd);
  const double cos_cd = cosine(grad_disc_cd, grad_pseudo_cd);

  // Theorem 6: stopgrad CT gradient direction.
  Vec grad_disc_ct;
  ct_loss_batch(model, theta, theta, ct, grid, loss, &grad_disc_ct);
  for (double& g : grad_disc_ct) g *= kSteps - 1.0;
  Vec grad_pseudo_ct;
  ct_inf_stopgrad(model, theta, target, cont, reparam, {}, &grad_pseudo_ct);
  const double cos_ct = cosine(grad_disc_ct, grad_pseudo_ct);

  result.passed = rel_gap < 0.05 && cos_cd > 0.99 && cos_ct > 0.99;
  result.details["scaled_discrete"] = scaled;
  result.details["continuous"] = l_cont;
  result.details["relative_gap"] = rel_gap;
  result.details["cosine_cd_stopgrad"] = cos_cd;
  result.details["cosine_ct_stopgrad"] = cos_ct;
  return result;
}

}  // namespace

std::vector<std::string> verify_check_names() {
  return {"boundary", "solver_orders", "lemma1", "cd_fidelity", "theorem2", "continuous_limits"};
}

CheckResult run_verify_check(const std::string& name, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult result;
  if (name == "boundary") {
    result = check_boundary(seed);
  } else if (name == "solver_orders") {
    result = check_solver_orders(seed);
  } else if (name == "lemma1") {
    result = check_lemma1(seed);
  } else if (name == "cd_fidelity") {
    result = check_cd_fidelity(seed);
  } else if (name == "theorem2") {
    result = check_theorem2(seed);
  } else if (name == "continuous_limits") {
    result = check_continuous_limits(seed);
  } else {
    throw input_error("verify: unknown check " + name);
  }
  const auto end = std::chrono::steady_clock::now();
  result.runtime_ms = std::chrono::duration<double, std::milli>(end - start).count();
  return result;
}

VerifyReport run_verify(const std::vector<std::string>& only, std::uint64_t seed) {
  VerifyReport report;
  report.seed = seed;
  const std::vector<std::string> names = only.empty() ? verify_check_names() : only;
  report.all_passed = true;
  for (const std::string& name : names) {
    report.checks.push_back(run_verify_check(name, seed));
    report.all_passed = report.all_passed && report.checks.back().passed;
  }
  return report;
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = format_version;
  j["seed"] = seed;
  j["all_passed"] = all_passed;
  j["checks"] = nlohmann::ordered_json::array();
  // Wall times are deliberately left out: reports are part of the
  // byte-identical determinism contract. Timings go to stdout.
  for (const CheckResult& c : checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["details"] = c.details;
    j["checks"].push_back(jc);
  }
  return j.dump(2);
}

}  // namespace cmlab

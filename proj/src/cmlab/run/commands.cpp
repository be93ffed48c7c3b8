#include "cmlab/run/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "cmlab/consistency/oracle.hpp"
#include "cmlab/consistency/train.hpp"
#include "cmlab/core/errors.hpp"
#include "cmlab/diffusion/dsm.hpp"
#include "cmlab/editing/edit.hpp"
#include "cmlab/eval/metrics.hpp"
#include "cmlab/run/checkpoint.hpp"
#include "cmlab/run/config.hpp"
#include "cmlab/run/csv_log.hpp"
#include "cmlab/run/verify.hpp"
#include "cmlab/sampling/sampler.hpp"

namespace cmlab {

namespace {

namespace fs = std::filesystem;
using steady = std::chrono::steady_clock;

int guard(const char* what, int (*body)(const CliArgs&), const CliArgs& args) {
  try {
    return body(args);
  } catch (const training_error& e) {
    std::cerr << what << ": " << e.what() << "\n";
    return 3;
  } catch (const input_error& e) {
    std::cerr << what << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << what << ": " << e.what() << "\n";
    return 1;
  }
}

RunConfig load_config(const CliArgs& args) {
  if (args.config_path.empty()) throw input_error("missing --config");
  RunConfig cfg = RunConfig::load(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.steps) cfg.steps = *args.steps;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  cfg.optimizer.total_steps = cfg.steps;
  return cfg;
}

std::string timing_header() { return "k,wall_ms"; }

// Train-command scaffolding shared by train-score / distill / train-ct:
// segmented loop with periodic checkpoints and atomic log flushes. Logs hold
// only deterministic columns; wall time goes to a sidecar file.
struct TrainSession {
  RunConfig cfg;
  std::string kind;
  Checkpoint::ModelKind model_kind;
  TrainState state;
  std::vector<TrainLogRow> rows;
  CsvLog log;
  CsvLog timing;
  steady::time_point start = steady::now();

  TrainSession(RunConfig config, std::string kind_name, Checkpoint::ModelKind mk)
      : cfg(std::move(config)),
        kind(std::move(kind_name)),
        model_kind(mk),
        log(cfg.out_dir + "/train_log.csv", "k,n_k,mu_k,loss"),
        timing(cfg.out_dir + "/timing.csv", timing_header()) {}

  void flush(long upto_row) {
    for (std::size_t i = log_flushed; i < rows.size() && rows[i].k < upto_row; ++i) {
      const TrainLogRow& r = rows[i];
      log.add_row(CsvLog::fmt(r.k) + "," + CsvLog::fmt(static_cast<long>(r.n_k)) + "," +
                  CsvLog::fmt(r.mu_k) + "," + CsvLog::fmt(r.loss));
      ++log_flushed;
    }
    log.flush();
    const double ms = std::chrono::duration<double, std::milli>(steady::now() - start).count();
    timing.add_row(CsvLog::fmt(state.step) + "," + CsvLog::fmt(ms));
    timing.flush();
  }

  void save_checkpoint(const std::string& name) {
    Checkpoint::from_state(model_kind, cfg.to_json(), state).save(cfg.out_dir + "/" + name);
  }

  std::size_t log_flushed = 0;
};

// Resume handling: the checkpoint's embedded config is authoritative; a
// --config that disagrees is rejected.
TrainState resume_or_fresh(TrainSession& session, const CliArgs& args,
                           const ConsistencyModel* model) {
  if (!args.checkpoint.empty()) {
    const Checkpoint ckpt = Checkpoint::load(args.checkpoint);
    if (!args.config_path.empty() && ckpt.config_json != session.cfg.to_json())
      throw input_error("resume: --config disagrees with the checkpoint's embedded config");
    return ckpt.to_state();
  }
  if (model) return make_train_state(*model, session.cfg.seed);
  return {};
}

ScoreField make_teacher(const RunConfig& cfg) {
  if (cfg.teacher_kind == "analytic") {
    if (!cfg.dataset.has_analytic_score())
      throw input_error("distill: analytic teacher requires a gaussian_mixture dataset");
    return ScoreField::analytic(cfg.dataset.mixture);
  }
  if (cfg.teacher_kind == "checkpoint") {
    const Checkpoint ckpt = Checkpoint::load(cfg.teacher_path);
    if (ckpt.model_kind != Checkpoint::ModelKind::score)
      throw input_error("distill: teacher checkpoint is not a score model");
    const RunConfig teacher_cfg = RunConfig::from_json(ckpt.config_json);
    LearnedScore learned{MlpNet(teacher_cfg.backbone_config()), teacher_cfg.sigma_data};
    learned.net.params().values = ckpt.online;
    return ScoreField::learned(std::move(learned));
  }
  throw input_error("distill: unknown teacher kind " + cfg.teacher_kind);
}

int train_score_body(const CliArgs& args) {
  RunConfig cfg = load_config(args);
  TrainSession session(cfg, "train-score", Checkpoint::ModelKind::score);

  LearnedScore score{MlpNet(cfg.backbone_config()), cfg.sigma_data};
  score.net.init(cfg.seed);
  TrainState state;
  if (!args.checkpoint.empty()) {
    const Checkpoint ckpt = Checkpoint::load(args.checkpoint);
    state = ckpt.to_state();
  } else {
    state.ema.online = score.net.params();
    state.ema.target = ParamVector{};  // score models carry no EMA target
    state.velocity.assign(score.net.params().size(), 0.0);
    state.rng = RandomStream(cfg.seed);
  }

  const TimeGrid grid = cfg.grid();
  const DataSampler data = cfg.dataset.sampler();
  const int dim = cfg.dataset.dim();
  session.state = state;

  Batch x_clean(cfg.batch), z(cfg.batch);
  std::vector<double> t_levels(cfg.batch);
  Vec grad;

  try {
    while (session.state.step < cfg.steps) {
      const long segment_end =
          std::min<long>(cfg.steps, session.state.step + cfg.checkpoint_every);
      for (; session.state.step < segment_end; ++session.state.step) {
        const long k = session.state.step;
        for (int i = 0; i < cfg.batch; ++i) {
          x_clean[i] = data(session.state.rng);
          const long n = session.state.rng.uniform_int(0, grid.steps - 1);
          t_levels[i] = grid.boundaries[n];
          z[i].resize(dim);
          session.state.rng.fill_normal(z[i].data(), dim);
        }
        const double loss = dsm_loss_batch(score, session.state.ema.online.values, x_clean,
                                           t_levels, z, &grad);
        if (!std::isfinite(loss)) throw training_error("train-score: loss diverged", k);
        sgd_apply({session.state.ema.online.values.data(), session.state.ema.online.values.size()},
                  grad, session.state.velocity, session.state.moment2, cfg.optimizer, k);
        session.rows.push_back({k, grid.steps, 0.0, loss});
      }
      session.flush(session.state.step);
      session.save_checkpoint("checkpoint_latest.bin");
    }
  } catch (const training_error&) {
    session.flush(session.state.step);
    throw;
  }
  session.save_checkpoint("checkpoint_final.bin");
  std::cout << "train-score: " << session.state.step << " steps, log at " << session.log.path()
            << "\n";
  return 0;
}

// Shared body for distill / train-ct.
int consistency_train_body(const CliArgs& args, bool distillation) {
  RunConfig cfg = load_config(args);
  TrainSession session(cfg, distillation ? "distill" : "train-ct",
                       Checkpoint::ModelKind::consistency);

  ConsistencyModel model(cfg.backbone_config(), cfg.sigma_data, cfg.grid_epsilon,
                         cfg.grid_horizon);
  model.backbone().init(cfg.seed);

  ScoreField teacher;
  if (distillation) {
    teacher = make_teacher(cfg);
    if (cfg.init_from_teacher && !teacher.is_analytic()) {
      const MlpNet& tnet = teacher.learned_body().net;
      if (tnet.params().size() != model.params().size())
        throw input_error("distill: teacher/backbone architectures differ, cannot warm start");
      model.params().values = tnet.params().values;
    }
  }

  session.state = resume_or_fresh(session, args, &model);

  const TimeGrid grid = cfg.grid();
  const DataSampler data = cfg.dataset.sampler();

  CdTrainConfig cd_cfg;
  cd_cfg.loss = cfg.loss_config();
  cd_cfg.opt = cfg.optimizer;
  cd_cfg.batch = cfg.batch;
  cd_cfg.mu = cfg.mu;
  cd_cfg.seed = cfg.seed;

  CtTrainConfig ct_cfg;
  ct_cfg.loss = cfg.loss_config();
  ct_cfg.opt = cfg.optimizer;
  ct_cfg.batch = cfg.batch;
  ct_cfg.schedule = cfg.schedule;
  ct_cfg.schedule.total_steps = cfg.schedule.total_steps;
  ct_cfg.seed = cfg.seed;

  try {
    while (session.state.step < cfg.steps) {
      const long segment_end =
          std::min<long>(cfg.steps, session.state.step + cfg.checkpoint_every);
      if (distillation) {
        train_cd_run(model, teacher, data, grid, cd_cfg, segment_end, session.state,
                     &session.rows);
      } else {
        train_ct_run(model, data, ct_cfg, segment_end, session.state, &session.rows);
      }
      session.flush(session.state.step);
      session.save_checkpoint("checkpoint_latest.bin");
    }
  } catch (const training_error&) {
    session.flush(session.state.step);
    throw;
  }
  session.save_checkpoint("checkpoint_final.bin");
  std::cout << session.kind << ": " << session.state.step << " steps, log at "
            << session.log.path() << "\n";
  return 0;
}

// --- sampling helpers -------------------------------------------------------

struct LoadedModel {
  std::unique_ptr<ConsistencyModel> model;
  std::unique_ptr<GaussianConsistencyOracle> oracle;
  RunConfig cfg;

  const ConsistencyMap& map() const {
    if (model) return *model;
    return *oracle;
  }
};

LoadedModel load_model(const CliArgs& args) {
  LoadedModel lm;
  if (args.use_oracle) {
    lm.cfg = load_config(args);
    if (lm.cfg.dataset.kind != DatasetKind::gaussian_mixture ||
        lm.cfg.dataset.mixture.components() != 1)
      throw input_error("--oracle requires a single-component gaussian_mixture dataset");
    lm.oracle = std::make_unique<GaussianConsistencyOracle>(lm.cfg.dataset.mixture.means[0],
                                                            lm.cfg.dataset.mixture.variances[0],
                                                            lm.cfg.grid_epsilon);
    return lm;
  }
  if (args.checkpoint.empty()) throw input_error("missing --checkpoint (or --oracle)");
  const Checkpoint ckpt = Checkpoint::load(args.checkpoint);
  if (ckpt.model_kind != Checkpoint::ModelKind::consistency)
    throw input_error("checkpoint does not hold a consistency model");
  lm.cfg = RunConfig::from_json(ckpt.config_json);
  if (args.seed) lm.cfg.seed = *args.seed;
  if (!args.out_dir.empty()) lm.cfg.out_dir = args.out_dir;
  lm.model = std::make_unique<ConsistencyModel>(lm.cfg.backbone_config(), lm.cfg.sigma_data,
                                                lm.cfg.grid_epsilon, lm.cfg.grid_horizon);
  lm.model->params().values = ckpt.online;
  return lm;
}

std::string batch_csv(const Batch& batch, int dim) {
  std::string out;
  for (int d = 0; d < dim; ++d) {
    out += (d ? "," : "");
    out += "x" + std::to_string(d);
  }
  out += '\n';
  for (const Vec& row : batch) {
    for (int d = 0; d < dim; ++d) {
      out += (d ? "," : "");
      out += CsvLog::fmt(row[d]);
    }
    out += '\n';
  }
  return out;
}

Batch read_batch_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw input_error("cannot read sample file " + path);
  std::string line;
  if (!std::getline(is, line)) throw input_error("empty sample file " + path);
  Batch batch;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Vec row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    batch.push_back(std::move(row));
  }
  return batch;
}

void write_samples(const RunConfig& cfg, const Batch& batch, const SamplePlan& plan,
                   std::uint64_t seed) {
  fs::create_directories(cfg.out_dir);
  write_file_atomic(cfg.out_dir + "/samples.csv", batch_csv(batch, cfg.dataset.dim()));
  if (cfg.dataset.kind == DatasetKind::procedural_images && !batch.empty()) {
    std::vector<Image> imgs;
    for (const Vec& v : batch) {
      Image img(cfg.dataset.images.height, cfg.dataset.images.width, 3);
      img.data = v;
      imgs.push_back(std::move(img));
    }
    write_ppm_grid(cfg.out_dir + "/samples.ppm", imgs, 8);
  }
  nlohmann::ordered_json meta;
  meta["count"] = batch.size();
  meta["seed"] = seed;
  meta["epsilon"] = cfg.grid_epsilon;
  meta["horizon"] = cfg.grid_horizon;
  meta["plan"] = plan.timepoints;
  write_file_atomic(cfg.out_dir + "/sample_meta.json", meta.dump(2));
}

SamplePlan plan_from_args(const CliArgs& args, const RunConfig& cfg) {
  SamplePlan plan;
  if (!args.tau_list.empty()) {
    std::stringstream ss(args.tau_list);
    std::string cell;
    while (std::getline(ss, cell, ',')) plan.timepoints.push_back(std::stod(cell));
    return plan;
  }
  const long steps = args.steps.value_or(1);
  if (steps < 1) throw input_error("multistep: --steps must be >= 1");
  if (steps == 1) return plan;
  const std::vector<double> pts = editing_timepoints(
      cfg.grid_epsilon, cfg.grid_horizon, cfg.grid_rho, static_cast<int>(steps) + 1);
  plan.timepoints.assign(pts.begin() + 1, pts.end() - 1);
  return plan;
}

int sample_body_common(const CliArgs& args, bool multistep) {
  LoadedModel lm = load_model(args);
  if (args.seed) lm.cfg.seed = *args.seed;
  const long count = args.count.value_or(256);
  if (count < 0) throw input_error("--count must be nonnegative");

  SamplePlan plan;
  if (multistep) plan = plan_from_args(args, lm.cfg);

  RandomStream rng(lm.cfg.seed);
  const Batch batch = sample_multistep(lm.map(), plan, lm.cfg.grid_epsilon, lm.cfg.grid_horizon,
                                       static_cast<int>(count), rng);
  write_samples(lm.cfg, batch, plan, lm.cfg.seed);
  std::cout << (multistep ? "multistep" : "sample") << ": wrote " << batch.size()
            << " samples to " << lm.cfg.out_dir << "\n";
  return 0;
}

int sample_body(const CliArgs& args) { return sample_body_common(args, false); }
int multistep_body(const CliArgs& args) { return sample_body_common(args, true); }

// --- editing ----------------------------------------------------------------

Image gray_of(const Image& img) {
  Image g = img;
  for (int i = 0; i < img.height; ++i) {
    for (int j = 0; j < img.width; ++j) {
      const double luma =
          0.2989 * img.at(i, j, 0) + 0.5870 * img.at(i, j, 1) + 0.1140 * img.at(i, j, 2);
      for (int k = 0; k < 3; ++k) g.at(i, j, k) = luma;
    }
  }
  return g;
}

Image block_average_upsample(const Image& img, int patch) {
  Image out = img;
  for (int bi = 0; bi < img.height / patch; ++bi) {
    for (int bj = 0; bj < img.width / patch; ++bj) {
      for (int k = 0; k < img.channels; ++k) {
        double acc = 0.0;
        for (int di = 0; di < patch; ++di)
          for (int dj = 0; dj < patch; ++dj) acc += img.at(bi * patch + di, bj * patch + dj, k);
        acc /= patch * patch;
        for (int di = 0; di < patch; ++di)
          for (int dj = 0; dj < patch; ++dj) out.at(bi * patch + di, bj * patch + dj, k) = acc;
      }
    }
  }
  return out;
}

int edit_body(const CliArgs& args) {
  LoadedModel lm = load_model(args);
  if (args.seed) lm.cfg.seed = *args.seed;
  fs::create_directories(lm.cfg.out_dir);

  Image input;
  if (!args.input_image.empty()) {
    input = read_ppm(args.input_image);
  } else {
    if (lm.cfg.dataset.kind != DatasetKind::procedural_images)
      throw input_error("edit: provide --input or configure a procedural_images dataset");
    RandomStream rng(lm.cfg.seed + 17);
    input = procedural_image(lm.cfg.dataset.images, rng);
  }

  EditTimeConfig time{lm.cfg.grid_epsilon, lm.cfg.grid_horizon, lm.cfg.grid_rho, 12};
  EditSpec spec;
  if (args.task == "inpaint") {
    std::vector<int> mask(input.size(), 0);
    Image masked = input;
    for (int i = 0; i < input.height; ++i) {
      for (int j = input.width / 2; j < input.width; ++j) {
        for (int k = 0; k < input.channels; ++k) {
          mask[(static_cast<std::size_t>(i) * input.width + j) * input.channels + k] = 1;
          masked.at(i, j, k) = 0.0;  // missing pixels masked out
        }
      }
    }
    spec = inpaint_spec(masked, mask, time);
  } else if (args.task == "colorize") {
    spec = colorize_spec(gray_of(input), time);
  } else if (args.task == "superres") {
    spec = superres_spec(block_average_upsample(input, args.patch), args.patch, time);
  } else if (args.task == "sdedit") {
    spec = sdedit_spec(input);
  } else {
    throw input_error("edit: unknown task " + args.task);
  }

  RandomStream rng(lm.cfg.seed);
  const EditResult result = edit(lm.map(), spec, lm.cfg.grid_epsilon, rng);
  write_ppm(lm.cfg.out_dir + "/reference.ppm", spec.reference);
  write_ppm(lm.cfg.out_dir + "/edited.ppm", result.image);
  std::cout << "edit: task " << args.task << ", outputs in " << lm.cfg.out_dir << "\n";
  return 0;
}

int eval_body(const CliArgs& args) {
  if (args.file_a.empty() || args.file_b.empty())
    throw input_error("eval: need two sample files");
  const Batch a = read_batch_csv(args.file_a);
  const Batch b = read_batch_csv(args.file_b);
  const MetricReport report = metric_report(a, b);
  const std::string out =
      args.out_dir.empty() ? std::string("metric_report.json") : args.out_dir + "/report.json";
  write_file_atomic(out, report.to_json() + "\n");
  std::cout << report.to_json() << "\n";
  return 0;
}

int verify_body(const CliArgs& args) {
  std::vector<std::string> only;
  if (!args.only.empty()) {
    std::stringstream ss(args.only);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty()) only.push_back(cell);
    }
  }
  const std::uint64_t seed = args.seed.value_or(1);
  const VerifyReport report = run_verify(only, seed);
  const std::string out_dir = args.out_dir.empty() ? std::string(".") : args.out_dir;
  write_file_atomic(out_dir + "/verify_report.json", report.to_json() + "\n");
  for (const CheckResult& c : report.checks) {
    std::printf("%-18s %s  (%.0f ms)\n", c.name.c_str(), c.passed ? "PASS" : "FAIL",
                c.runtime_ms);
  }
  return report.all_passed ? 0 : 1;
}

int distill_body(const CliArgs& args) { return consistency_train_body(args, true); }
int train_ct_body(const CliArgs& args) { return consistency_train_body(args, false); }

}  // namespace

int cmd_train_score(const CliArgs& args) { return guard("train-score", train_score_body, args); }
int cmd_distill(const CliArgs& args) { return guard("distill", distill_body, args); }
int cmd_train_ct(const CliArgs& args) { return guard("train-ct", train_ct_body, args); }
int cmd_sample(const CliArgs& args) { return guard("sample", sample_body, args); }
int cmd_multistep(const CliArgs& args) { return guard("multistep", multistep_body, args); }
int cmd_edit(const CliArgs& args) { return guard("edit", edit_body, args); }
int cmd_eval(const CliArgs& args) { return guard("eval", eval_body, args); }
int cmd_verify(const CliArgs& args) { return guard("verify-theory", verify_body, args); }

}  // namespace cmlab

#include "cmlab/run/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmlab/core/errors.hpp"

namespace cmlab {

using nlohmann::ordered_json;

namespace {

ordered_json dataset_to_json(const Dataset& ds) {
  ordered_json j;
  switch (ds.kind) {
    case DatasetKind::gaussian_mixture: {
      j["kind"] = "gaussian_mixture";
      j["weights"] = ds.mixture.weights;
      j["means"] = ds.mixture.means;
      j["variances"] = ds.mixture.variances;
      break;
    }
    case DatasetKind::swiss_roll:
      j["kind"] = "swiss_roll";
      j["noise"] = ds.noise;
      break;
    case DatasetKind::checkerboard:
      j["kind"] = "checkerboard";
      break;
    case DatasetKind::procedural_images:
      j["kind"] = "procedural_images";
      j["height"] = ds.images.height;
      j["width"] = ds.images.width;
      j["motif"] = ds.images.motif == ImageSpec::Motif::two_bars  ? "two_bars"
                   : ds.images.motif == ImageSpec::Motif::bars    ? "bars"
                                                                  : "blobs";
      break;
  }
  return j;
}

Dataset dataset_from_json(const ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian_mixture") {
    GaussianMixture gm;
    gm.weights = j.at("weights").get<std::vector<double>>();
    gm.means = j.at("means").get<std::vector<Vec>>();
    gm.variances = j.at("variances").get<std::vector<double>>();
    return Dataset::gaussian(std::move(gm));
  }
  if (kind == "swiss_roll") return Dataset::swiss_roll(j.value("noise", 0.05));
  if (kind == "checkerboard") return Dataset::checkerboard();
  if (kind == "procedural_images") {
    ImageSpec spec;
    spec.height = j.value("height", 8);
    spec.width = j.value("width", 8);
    const std::string motif = j.value("motif", "two_bars");
    spec.motif = motif == "two_bars" ? ImageSpec::Motif::two_bars
                 : motif == "bars"   ? ImageSpec::Motif::bars
                                     : ImageSpec::Motif::blobs;
    return Dataset::procedural(spec);
  }
  throw input_error("config: unknown dataset kind " + kind);
}

}  // namespace

MlpConfig RunConfig::backbone_config() const {
  MlpConfig cfg = model;
  cfg.input_dim = dataset.dim();
  cfg.sigma_ref = sigma_data;
  return cfg;
}

LossConfig RunConfig::loss_config() const {
  LossConfig cfg;
  cfg.metric = metric;
  cfg.solver = solver;
  return cfg;  // lambda(t) == 1
}

std::string RunConfig::to_json() const {
  ordered_json j;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["dataset"] = dataset_to_json(dataset);
  j["model"]["hidden"] = model.hidden;
  j["model"]["time_embed_dim"] = model.time_embed_dim;
  j["model"]["activation"] = model.activation == Activation::silu ? "silu" : "tanh";
  j["model"]["freq_min"] = model.freq_min;
  j["model"]["freq_max"] = model.freq_max;
  j["model"]["precondition_input"] = model.precondition_input;
  j["model"]["sigma_data"] = sigma_data;
  j["grid"]["epsilon"] = grid_epsilon;
  j["grid"]["horizon"] = grid_horizon;
  j["grid"]["rho"] = grid_rho;
  j["grid"]["steps"] = grid_steps;
  j["loss"]["metric"] = metric == Metric::squared_l2 ? "squared_l2" : "l1";
  j["loss"]["solver"] = solver == SolverKind::heun ? "heun" : "euler";
  j["schedule"]["total_steps"] = schedule.total_steps;
  j["schedule"]["s0"] = schedule.s0;
  j["schedule"]["s1"] = schedule.s1;
  j["schedule"]["mu0"] = schedule.mu0;
  if (schedule.fixed_steps) j["schedule"]["fixed_steps"] = *schedule.fixed_steps;
  if (schedule.fixed_mu) j["schedule"]["fixed_mu"] = *schedule.fixed_mu;
  j["optimizer"]["kind"] = optimizer.kind_name();
  j["optimizer"]["lr"] = optimizer.lr;
  j["optimizer"]["momentum"] = optimizer.momentum;
  j["optimizer"]["decay"] = optimizer.decay_name();
  j["optimizer"]["batch"] = batch;
  j["training"]["steps"] = steps;
  j["training"]["mu"] = mu;
  j["training"]["checkpoint_every"] = checkpoint_every;
  j["training"]["init_from_teacher"] = init_from_teacher;
  j["teacher"]["kind"] = teacher_kind;
  if (!teacher_path.empty()) j["teacher"]["path"] = teacher_path;
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw input_error(std::string("config: parse failure: ") + e.what());
  }

  RunConfig cfg;
  try {
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    if (j.contains("dataset")) cfg.dataset = dataset_from_json(j["dataset"]);
    if (j.contains("model")) {
      const auto& m = j["model"];
      cfg.model.hidden = m.value("hidden", cfg.model.hidden);
      cfg.model.time_embed_dim = m.value("time_embed_dim", cfg.model.time_embed_dim);
      cfg.model.activation =
          m.value("activation", std::string("silu")) == "tanh" ? Activation::tanh_act
                                                               : Activation::silu;
      cfg.model.freq_min = m.value("freq_min", cfg.model.freq_min);
      cfg.model.freq_max = m.value("freq_max", cfg.model.freq_max);
      cfg.model.precondition_input = m.value("precondition_input", cfg.model.precondition_input);
      cfg.sigma_data = m.value("sigma_data", cfg.sigma_data);
    }
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      cfg.grid_epsilon = g.value("epsilon", cfg.grid_epsilon);
      cfg.grid_horizon = g.value("horizon", cfg.grid_horizon);
      cfg.grid_rho = g.value("rho", cfg.grid_rho);
      cfg.grid_steps = g.value("steps", cfg.grid_steps);
    }
    if (j.contains("loss")) {
      const auto& l = j["loss"];
      cfg.metric = l.value("metric", std::string("squared_l2")) == "l1" ? Metric::l1
                                                                        : Metric::squared_l2;
      cfg.solver = l.value("solver", std::string("heun")) == "euler" ? SolverKind::euler
                                                                     : SolverKind::heun;
    }
    if (j.contains("schedule")) {
      const auto& s = j["schedule"];
      cfg.schedule.total_steps = s.value("total_steps", cfg.schedule.total_steps);
      cfg.schedule.s0 = s.value("s0", cfg.schedule.s0);
      cfg.schedule.s1 = s.value("s1", cfg.schedule.s1);
      cfg.schedule.mu0 = s.value("mu0", cfg.schedule.mu0);
      if (s.contains("fixed_steps")) cfg.schedule.fixed_steps = s["fixed_steps"].get<int>();
      if (s.contains("fixed_mu")) cfg.schedule.fixed_mu = s["fixed_mu"].get<double>();
    }
    if (j.contains("optimizer")) {
      const auto& o = j["optimizer"];
      cfg.optimizer.adam = o.value("kind", std::string("sgd")) == "adam";
      cfg.optimizer.lr = o.value("lr", cfg.optimizer.lr);
      cfg.optimizer.momentum = o.value("momentum", cfg.optimizer.momentum);
      cfg.optimizer.cosine_decay = o.value("decay", std::string("constant")) == "cosine";
      cfg.batch = o.value("batch", cfg.batch);
    }
    if (j.contains("training")) {
      const auto& t = j["training"];
      cfg.steps = t.value("steps", cfg.steps);
      cfg.mu = t.value("mu", cfg.mu);
      cfg.checkpoint_every = t.value("checkpoint_every", cfg.checkpoint_every);
      cfg.init_from_teacher = t.value("init_from_teacher", cfg.init_from_teacher);
    }
    if (j.contains("teacher")) {
      cfg.teacher_kind = j["teacher"].value("kind", cfg.teacher_kind);
      cfg.teacher_path = j["teacher"].value("path", cfg.teacher_path);
    }
  } catch (const input_error&) {
    throw;
  } catch (const std::exception& e) {
    throw input_error(std::string("config: ") + e.what());
  }
  cfg.optimizer.total_steps = cfg.steps;
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw input_error("config: cannot read " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return from_json(buf.str());
}

}  // namespace cmlab

#include <CLI11.hpp>

#include <cstdint>
#include <string>

#include "cmlab/run/commands.hpp"

namespace {

// Flags shared by every subcommand; each maps straight onto CliArgs.
void add_common(CLI::App* cmd, cmlab::CliArgs& args, std::uint64_t& seed_storage,
                long& steps_storage, long& count_storage, bool& seed_set, bool& steps_set,
                bool& count_set) {
  cmd->add_option("--config", args.config_path, "run configuration (JSON)");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--checkpoint", args.checkpoint, "checkpoint path (resume / model source)");
  cmd->add_option("--seed", seed_storage, "seed override")->each([&](const std::string&) {
    seed_set = true;
  });
  cmd->add_option("--steps", steps_storage, "step count override")->each([&](const std::string&) {
    steps_set = true;
  });
  cmd->add_option("--count", count_storage, "sample count")->each([&](const std::string&) {
    count_set = true;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cmlab: consistency-model laboratory (training, sampling, zero-shot editing, theory "
      "checks)"};
  app.require_subcommand(1);

  cmlab::CliArgs args;
  std::uint64_t seed_storage = 0;
  long steps_storage = 0;
  long count_storage = 0;
  bool seed_set = false, steps_set = false, count_set = false;

  auto* train_score = app.add_subcommand("train-score", "train a score model (DSM)");
  auto* distill = app.add_subcommand("distill", "consistency distillation from a teacher score");
  auto* train_ct = app.add_subcommand("train-ct", "consistency training, no teacher");
  auto* sample = app.add_subcommand("sample", "one-step generation");
  auto* multistep = app.add_subcommand("multistep", "multistep generation");
  auto* edit = app.add_subcommand("edit", "zero-shot editing tasks");
  auto* eval = app.add_subcommand("eval", "distribution metrics between two sample files");
  auto* verify = app.add_subcommand("verify-theory", "closed-form theory checks");

  for (CLI::App* cmd :
       {train_score, distill, train_ct, sample, multistep, edit, eval, verify}) {
    add_common(cmd, args, seed_storage, steps_storage, count_storage, seed_set, steps_set,
               count_set);
  }
  for (CLI::App* cmd : {sample, multistep, edit}) {
    cmd->add_flag("--oracle", args.use_oracle,
                  "use the analytic Gaussian consistency map from the config dataset");
  }
  multistep->add_option("--tau", args.tau_list, "explicit time points, comma separated");
  edit->add_option("--task", args.task, "inpaint | colorize | superres | sdedit");
  edit->add_option("--input", args.input_image, "input image (PPM)");
  edit->add_option("--patch", args.patch, "super-resolution patch size");
  eval->add_option("file_a", args.file_a, "first sample CSV")->required();
  eval->add_option("file_b", args.file_b, "second sample CSV")->required();
  verify->add_option("--only", args.only, "comma-separated check filter");

  CLI11_PARSE(app, argc, argv);

  if (seed_set) args.seed = seed_storage;
  if (steps_set) args.steps = steps_storage;
  if (count_set) args.count = count_storage;

  if (train_score->parsed()) return cmlab::cmd_train_score(args);
  if (distill->parsed()) return cmlab::cmd_distill(args);
  if (train_ct->parsed()) return cmlab::cmd_train_ct(args);
  if (sample->parsed()) return cmlab::cmd_sample(args);
  if (multistep->parsed()) return cmlab::cmd_multistep(args);
  if (edit->parsed()) return cmlab::cmd_edit(args);
  if (eval->parsed()) return cmlab::cmd_eval(args);
  if (verify->parsed()) return cmlab::cmd_verify(args);
  return 1;
}

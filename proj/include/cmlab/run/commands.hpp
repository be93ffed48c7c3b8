#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace cmlab {

// Parsed command-line arguments shared across subcommands. Tests drive the
// same entry points the CLI does.
struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::string checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<long> steps;
  std::optional<long> count;
  std::string only;         // verify-theory filter, comma separated
  bool use_oracle = false;  // analytic Gaussian map instead of a checkpoint
  std::string task = "inpaint";
  std::string input_image;
  std::string tau_list;  // explicit multistep time points, comma separated
  int patch = 2;
  std::string file_a;
  std::string file_b;
};

// Exit codes: 0 ok, 1 check failure, 2 bad input/config/missing checkpoint,
// 3 training divergence (last periodic checkpoint preserved).
int cmd_train_score(const CliArgs& args);
int cmd_distill(const CliArgs& args);
int cmd_train_ct(const CliArgs& args);
int cmd_sample(const CliArgs& args);
int cmd_multistep(const CliArgs& args);
int cmd_edit(const CliArgs& args);
int cmd_eval(const CliArgs& args);
int cmd_verify(const CliArgs& args);

}  // namespace cmlab

#pragma once

// The debiasrank command line: a flat key=value configuration shared by all
// subcommands, and one function per subcommand.

#include "debias/eval.hpp"
#include "debias/permute.hpp"
#include "debias/scorer.hpp"
#include "debias/train.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace debias {

/// Bad invocation or configuration (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string candidates;
  std::string qrels;
  std::string params;
  std::string propensity;
  std::string run;
  std::string runs;  ///< comma-separated run files for aggregate
  std::string out = "out";

  SynthConfig synth;
  TrainConfig train;
  double ips_learning_rate = 3e-7;
  double bias_scale = 3.0;
  double prior_strength = 1.0;
  int step = 10;

  Augmentation augmentation = Augmentation::PositionAware;
  int augmentation_n = 10;
  std::uint64_t augmentation_seed = 17;

  int propensity_queries = 300;
  int propensity_shuffles = 10;
  std::uint64_t propensity_seed = 23;

  std::string order_mode = "both";
  int shuffled_runs = 1;
  double p_fail = 0.0;
  std::uint64_t eval_seed = 31;

  Aggregation aggregation = Aggregation::Kemeny;
  double rrf_c = 60.0;
  int exact_limit = 8;
  std::string tag = "debiasrank";

  ExperimentConfig();
};

struct ConfigKey {
  std::string name;
  std::string help;
};

/// Every configurable key, in dump order.
const std::vector<ConfigKey>& config_keys();

/// Throws UsageError for unknown keys or unparsable values.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const ExperimentConfig& cfg, std::string_view key);

/// key=value lines; '#' starts a comment.
void apply_config_file(ExperimentConfig& cfg, std::istream& is, const std::string& source);
void dump_config(const ExperimentConfig& cfg, std::ostream& os);

void cmd_synth(const ExperimentConfig& cfg, std::ostream& log);
void cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log);
void cmd_estimate_propensity(const ExperimentConfig& cfg, std::ostream& log);
void cmd_augment(const ExperimentConfig& cfg, std::ostream& log);
void cmd_train(const ExperimentConfig& cfg, std::ostream& log);
void cmd_rerank(const ExperimentConfig& cfg, std::ostream& log);
void cmd_eval(const ExperimentConfig& cfg, std::ostream& log);
void cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);
void cmd_aggregate(const ExperimentConfig& cfg, std::ostream& log);
void cmd_benchmark(const ExperimentConfig& cfg, std::ostream& log);

/// Entry point. Returns 0 on success, 1 on usage errors, 2 on data errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace debias

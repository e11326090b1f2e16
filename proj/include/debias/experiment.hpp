#pragma once

// End-to-end reference benchmark: skewed synthetic training data, a biased
// reference reranker for propensity estimation, training of each loss /
// augmentation variant, and the positional, shuffled-order and aggregation
// measurements run on a held-out split.

#include "debias/eval.hpp"
#include "debias/loss.hpp"
#include "debias/permute.hpp"
#include "debias/propensity.hpp"
#include "debias/scorer.hpp"
#include "debias/train.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace debias {

struct VariantSpec {
  std::string name;
  Augmentation augmentation = Augmentation::None;
  LossVariant loss = LossVariant::First;
};

struct BenchmarkConfig {
  SynthConfig train_data;
  SynthConfig eval_data;
  double bias_scale = 1.0;
  double prior_strength = 1.0;  ///< untrained position pathway slope
  TrainConfig train;
  /// Learning rate for propensity-weighted variants, whose loss carries the
  /// 1/omega^2 factor.
  double ips_learning_rate = 1e-7;
  int augmentation_n = 10;
  std::uint64_t augmentation_seed = 17;
  int propensity_queries = 300;
  int propensity_shuffles = 10;
  std::uint64_t propensity_seed = 23;
  int shuffled_runs = 20;
  std::uint64_t eval_seed = 31;

  /// 1000 train / 200 eval queries, k = 20, strong early-position skew.
  static BenchmarkConfig reference();
};

struct BenchmarkData {
  SynthDataset train;
  SynthDataset eval;
};

BenchmarkData make_benchmark_data(const BenchmarkConfig& cfg);

Params initial_params(const BenchmarkConfig& cfg);

/// Shuffles every source list `shuffles` times (Fisher-Yates followed by
/// grouping-and-rotation), reranks each copy with `reference` and counts
/// input-position -> output-rank transitions.
TransitionCounts observe_transitions(const std::vector<Example>& source, const Params& reference,
                                     int shuffles, const RngStream& rng);

/// Shuffles (Fisher-Yates + grouping-and-rotation) the first
/// cfg.propensity_queries training lists cfg.propensity_shuffles times,
/// reranks them with `reference` and counts transitions.
TransitionCounts reference_transitions(const BenchmarkConfig& cfg, const BenchmarkData& data,
                                       const Params& reference);

/// Trains one variant; omega must be given for propensity-weighted losses.
TrainReport train_variant(const BenchmarkConfig& cfg, const BenchmarkData& data,
                          const VariantSpec& spec, const PropensityMatrix* omega);

struct VariantOutcome {
  VariantSpec spec;
  TrainReport report;
  SweepResult sweep;
  EvalReport original;
  EvalReport shuffled;
};

VariantOutcome measure_variant(const BenchmarkConfig& cfg, const BenchmarkData& data,
                               const VariantSpec& spec, const TrainReport& report);

struct AggregationOutcome {
  double mean_individual = 0.0;  ///< mean over runs of mean NDCG@10
  double aggregated = 0.0;       ///< mean NDCG@10 of the Kemeny-aggregated run
  double min_individual = 0.0;
  double variance_pp = 0.0;      ///< run_variance over the shuffled runs
  double gap() const { return aggregated - mean_individual; }
};

/// cfg.shuffled_runs shuffled evaluations, aggregated per query.
AggregationOutcome aggregation_study(const BenchmarkConfig& cfg, const BenchmarkData& data,
                                     const Params& params);

struct BenchmarkResult {
  PropensityMatrix omega;
  TransitionCounts reference_counts;
  std::vector<VariantOutcome> variants;
  const VariantOutcome& get(const std::string& name) const;
};

/// The standard variant set: first, debiasfirst, the augmentation ablation
/// (noaug/randaug/posaug under the First objective) and the calibration
/// ablation (rank / rank-ips without augmentation).
std::vector<VariantSpec> standard_variants();

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, const BenchmarkData& data,
                              const std::vector<VariantSpec>& variants);

}  // namespace debias

#include "debias/experiment.hpp"

#include "debias/rerank.hpp"

#include <map>

namespace debias {

BenchmarkConfig BenchmarkConfig::reference() {
  BenchmarkConfig cfg;
  cfg.train_data.num_queries = 1000;
  cfg.train_data.k = 20;
  cfg.train_data.d = 8;
  cfg.train_data.relevance_position_skew = 1.0;
  cfg.train_data.noise_sigma = 1.0;
  cfg.train_data.seed = 2024;
  cfg.eval_data = cfg.train_data;
  cfg.eval_data.num_queries = 200;
  cfg.eval_data.first_query = cfg.train_data.num_queries;
  cfg.bias_scale = 3.0;
  cfg.prior_strength = 1.0;
  cfg.ips_learning_rate = 3e-7;
  cfg.train.learning_rate = 0.05;
  cfg.train.epochs = 10;
  cfg.train.batch_size = 8;
  cfg.train.seed = 7;
  return cfg;
}

BenchmarkData make_benchmark_data(const BenchmarkConfig& cfg) {
  return {synth_generate(cfg.train_data), synth_generate(cfg.eval_data)};
}

Params initial_params(const BenchmarkConfig& cfg) {
  return make_params(cfg.train_data.d, cfg.train_data.k, cfg.bias_scale, cfg.prior_strength);
}

TransitionCounts observe_transitions(const std::vector<Example>& source, const Params& reference,
                                     int shuffles, const RngStream& rng) {
  const auto shuffled = pos_aug(source, shuffles, rng);
  std::vector<Example> observed;
  observed.reserve(shuffled.instances.size());
  for (const auto& inst : shuffled.instances) {
    observed.push_back({inst.list, rerank(reference, inst.list)});
  }
  return count_transitions(observed, shuffles);
}

TransitionCounts reference_transitions(const BenchmarkConfig& cfg, const BenchmarkData& data,
                                       const Params& reference) {
  const auto nq = std::min<std::size_t>(data.train.examples.size(),
                                        static_cast<std::size_t>(cfg.propensity_queries));
  const std::vector<Example> source(data.train.examples.begin(),
                                    data.train.examples.begin() + static_cast<long>(nq));
  return observe_transitions(source, reference, cfg.propensity_shuffles,
                             RngStream(cfg.propensity_seed, 0));
}

TrainReport train_variant(const BenchmarkConfig& cfg, const BenchmarkData& data,
                          const VariantSpec& spec, const PropensityMatrix* omega) {
  const auto augmented = augment(data.train.examples, spec.augmentation, cfg.augmentation_n,
                                 RngStream(cfg.augmentation_seed, 0));
  TrainConfig tc = cfg.train;
  tc.loss.variant = spec.loss;
  if (uses_propensities(spec.loss)) tc.learning_rate = cfg.ips_learning_rate;
  return train(augmented.instances, initial_params(cfg), tc,
               uses_propensities(spec.loss) ? omega : nullptr);
}

VariantOutcome measure_variant(const BenchmarkConfig& cfg, const BenchmarkData& data,
                               const VariantSpec& spec, const TrainReport& report) {
  VariantOutcome out;
  out.spec = spec;
  out.report = report;
  const auto& params = report.final_params;
  out.sweep = positional_sweep(params, std::span<const Example>(data.eval.examples),
                               data.eval.judgments);
  EvalOptions opts;
  opts.tag = spec.name;
  out.original = evaluate(params, std::span<const Example>(data.eval.examples),
                          data.eval.judgments, opts);
  const RngStream rng(cfg.eval_seed, 0);
  opts.mode = OrderMode::Shuffled;
  opts.rng = &rng;
  out.shuffled = evaluate(params, std::span<const Example>(data.eval.examples),
                          data.eval.judgments, opts);
  return out;
}

AggregationOutcome aggregation_study(const BenchmarkConfig& cfg, const BenchmarkData& data,
                                     const Params& params) {
  std::vector<EvalReport> reports;
  std::vector<std::vector<RunRecord>> runs;
  for (int r = 0; r < cfg.shuffled_runs; ++r) {
    const RngStream rng(cfg.eval_seed, static_cast<std::uint64_t>(r) + 1);
    EvalOptions opts;
    opts.mode = OrderMode::Shuffled;
    opts.rng = &rng;
    reports.push_back(evaluate(params, std::span<const Example>(data.eval.examples),
                               data.eval.judgments, opts));
    runs.push_back(reports.back().run);
  }
  AggregationOutcome out;
  out.min_individual = 1.0;
  for (const auto& rep : reports) {
    out.mean_individual += rep.mean_ndcg_at_10;
    out.min_individual = std::min(out.min_individual, rep.mean_ndcg_at_10);
  }
  out.mean_individual /= static_cast<double>(reports.size());
  out.variance_pp = reports.size() >= 2 ? run_variance(reports) : 0.0;
  const auto fused = aggregate_runs(runs, Aggregation::Kemeny, "permsc");
  out.aggregated = mean_of(evaluate_run(fused, data.eval.judgments));
  return out;
}

const VariantOutcome& BenchmarkResult::get(const std::string& name) const {
  for (const auto& v : variants) {
    if (v.spec.name == name) return v;
  }
  throw DataError("no benchmark variant named " + name);
}

std::vector<VariantSpec> standard_variants() {
  return {
      {"first", Augmentation::None, LossVariant::First},
      {"debiasfirst", Augmentation::PositionAware, LossVariant::DebiasFirst},
      {"noaug", Augmentation::None, LossVariant::First},
      {"randaug", Augmentation::Random, LossVariant::First},
      {"posaug", Augmentation::PositionAware, LossVariant::First},
      {"rank", Augmentation::None, LossVariant::Rank},
      {"rank-ips", Augmentation::None, LossVariant::RankIPS},
  };
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, const BenchmarkData& data,
                              const std::vector<VariantSpec>& variants) {
  BenchmarkResult result;
  std::map<std::pair<Augmentation, LossVariant>, TrainReport> cache;
  auto trained = [&](const VariantSpec& spec) -> const TrainReport& {
    const auto key = std::make_pair(spec.augmentation, spec.loss);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, train_variant(cfg, data, spec, &result.omega)).first;
    }
    return it->second;
  };

  // The un-debiased First model doubles as the propensity reference.
  const auto& reference = trained({"first", Augmentation::None, LossVariant::First});
  result.reference_counts = reference_transitions(cfg, data, reference.final_params);
  result.omega = estimate_propensities(result.reference_counts);

  for (const auto& spec : variants) {
    result.variants.push_back(measure_variant(cfg, data, spec, trained(spec)));
  }
  return result;
}

}  // namespace debias

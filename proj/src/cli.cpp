#include "debias/cli.hpp"

#include "debias/experiment.hpp"
#include "debias/io.hpp"
#include "debias/propensity.hpp"
#include "debias/rerank.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

namespace debias {

ExperimentConfig::ExperimentConfig() {
  synth.num_queries = 100;
  synth.relevance_position_skew = 1.0;
  synth.seed = 2024;
  train.learning_rate = 0.05;
  train.epochs = 10;
  train.seed = 7;
  train.loss.variant = LossVariant::DebiasFirst;
}

namespace {

std::string show(const std::string& v) { return v; }
std::string show(double v) { return format_double(v); }
std::string show(int v) { return std::to_string(v); }
std::string show(std::uint64_t v) { return std::to_string(v); }
std::string show(bool v) { return v ? "true" : "false"; }
std::string show(Augmentation v) { return std::string(to_string(v)); }
std::string show(LossVariant v) { return std::string(to_string(v)); }
std::string show(Aggregation v) { return std::string(to_string(v)); }
std::string show(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

void read(std::string_view s, std::string& out) { out = std::string(s); }
void read(std::string_view s, double& out) { out = parse_double(s, "number"); }
void read(std::string_view s, int& out) {
  const auto v = parse_int(s, "integer");
  if (v < INT32_MIN || v > INT32_MAX) throw DataError("integer out of range");
  out = static_cast<int>(v);
}
void read(std::string_view s, std::uint64_t& out) {
  const auto v = parse_int(s, "seed");
  if (v < 0) throw DataError("seed must be non-negative");
  out = static_cast<std::uint64_t>(v);
}
void read(std::string_view s, bool& out) {
  if (s == "true" || s == "1") {
    out = true;
  } else if (s == "false" || s == "0") {
    out = false;
  } else {
    throw DataError("expected true or false");
  }
}
void read(std::string_view s, Augmentation& out) { out = parse_augmentation(s); }
void read(std::string_view s, LossVariant& out) { out = parse_loss_variant(s); }
void read(std::string_view s, Aggregation& out) { out = parse_aggregation(s); }
void read(std::string_view s, std::vector<int>& out) {
  out.clear();
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = std::min(s.find(',', start), s.size());
    out.push_back(static_cast<int>(parse_int(s.substr(start, end - start), "grade")));
    start = end + 1;
  }
}

struct KeyBinding {
  ConfigKey key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

#define DEBIAS_KEY(NAME, FIELD, HELP)                                        \
  KeyBinding {                                                               \
    {NAME, HELP}, [](const ExperimentConfig& c) { return show(c.FIELD); },   \
        [](ExperimentConfig& c, std::string_view v) { read(v, c.FIELD); }    \
  }

const std::vector<KeyBinding>& bindings() {
  static const std::vector<KeyBinding> table = {
      DEBIAS_KEY("candidates", candidates, "candidate lists (JSON lines)"),
      DEBIAS_KEY("qrels", qrels, "relevance judgments (TREC qrels)"),
      DEBIAS_KEY("params", params, "scorer parameters CSV"),
      DEBIAS_KEY("propensity", propensity, "propensity CSV"),
      DEBIAS_KEY("run", run, "TREC run file to evaluate instead of reranking"),
      DEBIAS_KEY("runs", runs, "comma-separated run files to aggregate"),
      DEBIAS_KEY("out", out, "output directory"),
      DEBIAS_KEY("num_queries", synth.num_queries, "synthetic queries"),
      DEBIAS_KEY("first_query", synth.first_query, "index of the first synthetic query"),
      DEBIAS_KEY("k", synth.k, "passages per query"),
      DEBIAS_KEY("d", synth.d, "feature dimension"),
      DEBIAS_KEY("skew", synth.relevance_position_skew, "relevant-position skew"),
      DEBIAS_KEY("label_grades", synth.label_grades, "comma-separated grade set"),
      DEBIAS_KEY("noise_sigma", synth.noise_sigma, "feature noise"),
      DEBIAS_KEY("synth_seed", synth.seed, "synthetic data seed"),
      DEBIAS_KEY("loss", train.loss.variant, "rank|rank-ips|lm|first|debiasfirst"),
      DEBIAS_KEY("lambda", train.loss.lambda, "ranking-loss weight"),
      DEBIAS_KEY("learning_rate", train.learning_rate, "SGD step size"),
      DEBIAS_KEY("ips_learning_rate", ips_learning_rate,
                 "step size for propensity-weighted losses"),
      DEBIAS_KEY("epochs", train.epochs, "training epochs"),
      DEBIAS_KEY("batch_size", train.batch_size, "minibatch size"),
      DEBIAS_KEY("momentum", train.momentum, "heavy-ball momentum"),
      DEBIAS_KEY("shuffle_each_epoch", train.shuffle_each_epoch, "reshuffle instances"),
      DEBIAS_KEY("train_seed", train.seed, "training order seed"),
      DEBIAS_KEY("bias_scale", bias_scale, "strength of the position pathway"),
      DEBIAS_KEY("prior_strength", prior_strength, "initial position-weight slope"),
      DEBIAS_KEY("step", step, "sliding-window stride for lists longer than the window"),
      DEBIAS_KEY("augmentation", augmentation, "none|rand|pos"),
      DEBIAS_KEY("augmentation_n", augmentation_n, "copies per query"),
      DEBIAS_KEY("augmentation_seed", augmentation_seed, "augmentation seed"),
      DEBIAS_KEY("propensity_queries", propensity_queries, "queries used for estimation"),
      DEBIAS_KEY("propensity_shuffles", propensity_shuffles, "shuffles per query"),
      DEBIAS_KEY("propensity_seed", propensity_seed, "estimation shuffle seed"),
      DEBIAS_KEY("order_mode", order_mode, "original|shuffled|both"),
      DEBIAS_KEY("shuffled_runs", shuffled_runs, "independent shuffled evaluations"),
      DEBIAS_KEY("p_fail", p_fail, "per-passage omission probability"),
      DEBIAS_KEY("eval_seed", eval_seed, "shuffle and failure seed"),
      DEBIAS_KEY("aggregation", aggregation, "kemeny|rrf"),
      DEBIAS_KEY("rrf_c", rrf_c, "RRF constant"),
      DEBIAS_KEY("exact_limit", exact_limit, "largest k aggregated exhaustively"),
      DEBIAS_KEY("tag", tag, "run tag"),
  };
  return table;
}

#undef DEBIAS_KEY

const KeyBinding& find_key(std::string_view key) {
  for (const auto& b : bindings()) {
    if (b.key.name == key) return b;
  }
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw DataError(cfg.out + ": cannot create output directory: " + ec.message());
  return (std::filesystem::path(cfg.out) / name).string();
}

const std::string& require(const std::string& value, const char* key) {
  if (value.empty()) throw UsageError(std::string("missing required key '") + key + "'");
  return value;
}

std::vector<Example> load_examples(const ExperimentConfig& cfg) {
  auto ex = load_candidates(require(cfg.candidates, "candidates"));
  if (ex.empty()) throw DataError(cfg.candidates + ": no queries");
  return ex;
}

Params load_scorer(const ExperimentConfig& cfg, const std::vector<Example>& ex) {
  auto p = load_params(require(cfg.params, "params"));
  const auto d = ex.front().list.dim();
  if (p.dim() != d) {
    throw DataError(cfg.params + ": scorer expects dimension " + std::to_string(p.dim()) +
                    ", candidates have " + std::to_string(d));
  }
  return p;
}

std::vector<CandidateList> lists_of(const std::vector<Example>& ex) {
  std::vector<CandidateList> out;
  out.reserve(ex.size());
  for (const auto& e : ex) out.push_back(e.list);
  return out;
}

std::string two_digit(int r) {
  return (r < 10 ? "0" : "") + std::to_string(r);
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& b : bindings()) k.push_back(b.key);
    return k;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const auto& b = find_key(key);
  try {
    b.set(cfg, value);
  } catch (const DataError& e) {
    throw UsageError("config key '" + std::string(key) + "': " + e.what());
  }
}

std::string get_config_value(const ExperimentConfig& cfg, std::string_view key) {
  return find_key(key).get(cfg);
}

void apply_config_file(ExperimentConfig& cfg, std::istream& is, const std::string& source) {
  std::string line;
  std::size_t no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(is, line)) {
    ++no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(source + ":" + std::to_string(no) + ": expected key=value");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(source + ":" + std::to_string(no) + ": " + e.what());
    }
  }
}

void dump_config(const ExperimentConfig& cfg, std::ostream& os) {
  for (const auto& b : bindings()) os << b.key.name << '=' << b.get(cfg) << '\n';
}

void cmd_synth(const ExperimentConfig& cfg, std::ostream& log) {
  const auto data = synth_generate(cfg.synth);
  const auto cand = out_path(cfg, "candidates.jsonl");
  const auto qrels = out_path(cfg, "qrels.txt");
  save(cand, [&](std::ostream& os) { write_candidates(os, data.examples); });
  save(qrels, [&](std::ostream& os) { write_qrels(os, data.judgments); });
  log << "wrote " << data.examples.size() << " queries to " << cand << " and " << qrels << '\n';
}

void cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log) {
  const auto ex = load_examples(cfg);
  const auto judgments = load_qrels(require(cfg.qrels, "qrels"));
  const auto k = ex.front().list.size();
  std::vector<long long> hist(k, 0);
  long long without = 0;
  for (const auto& e : ex) {
    if (e.list.size() != k) throw DataError(cfg.candidates + ": lists differ in size");
    try {
      ++hist[relevant_index(e.list, judgments)];
    } catch (const DataError&) {
      ++without;
    }
  }
  const auto hist_path = out_path(cfg, "relevant_positions.csv");
  save(hist_path, [&](std::ostream& os) {
    os << "position,count\n";
    for (std::size_t p = 0; p < k; ++p) os << p + 1 << ',' << hist[p] << '\n';
  });
  const auto counts = count_transitions(ex);
  const auto trans_path = out_path(cfg, "transitions.csv");
  save(trans_path, [&](std::ostream& os) { write_heatmap(os, counts); });
  log << "queries=" << ex.size() << " without_relevant=" << without << '\n';
  log << "relevant at position 1: " << hist.front() << ", at position " << k << ": "
      << hist.back() << '\n';
  log << "max/min transition cell: " << counts.counts.maxCoeff() << '/'
      << counts.counts.minCoeff() << '\n';
  log << "wrote " << hist_path << " and " << trans_path << '\n';
}

void cmd_estimate_propensity(const ExperimentConfig& cfg, std::ostream& log) {
  const auto ex = load_examples(cfg);
  const auto k = static_cast<Eigen::Index>(ex.front().list.size());
  Params reference;
  if (cfg.params.empty()) {
    // content-blind scorer with a decreasing position prior: returns the input order
    reference = make_params(ex.front().list.dim(), k, 1.0, 1.0);
    log << "no params given, using the identity reference scorer\n";
  } else {
    reference = load_scorer(cfg, ex);
  }
  if (cfg.propensity_queries < 1 || cfg.propensity_shuffles < 1) {
    throw UsageError("propensity_queries and propensity_shuffles must be >= 1");
  }
  const auto nq = std::min(ex.size(), static_cast<std::size_t>(cfg.propensity_queries));
  const std::vector<Example> source(ex.begin(), ex.begin() + static_cast<long>(nq));
  const auto counts = observe_transitions(source, reference, cfg.propensity_shuffles,
                                          RngStream(cfg.propensity_seed, 0));
  const auto omega = estimate_propensities(counts);
  const auto prop_path = out_path(cfg, "propensity.csv");
  const auto count_path = out_path(cfg, "transition_counts.csv");
  save(prop_path, [&](std::ostream& os) { write_propensity(os, omega); });
  save(count_path, [&](std::ostream& os) { write_heatmap(os, counts); });
  const Eigen::VectorXd rows = omega.unclamped.rowwise().sum();
  log << "observations=" << counts.observations() << " (" << nq << " queries x "
      << cfg.propensity_shuffles << " shuffles)\n";
  log << "row sums min=" << format_double(rows.minCoeff())
      << " max=" << format_double(rows.maxCoeff()) << " target 1/k=" << format_double(1.0 / k)
      << " total=" << format_double(omega.unclamped.sum()) << '\n';
  log << "wrote " << prop_path << " and " << count_path << '\n';
}

void cmd_augment(const ExperimentConfig& cfg, std::ostream& log) {
  const auto ex = load_examples(cfg);
  const auto aug = augment(ex, cfg.augmentation, cfg.augmentation_n,
                           RngStream(cfg.augmentation_seed, 0));
  const auto path = out_path(cfg, "augmented.jsonl");
  save(path, [&](std::ostream& os) { write_candidates(os, aug.instances); });
  log << "augmentation=" << to_string(cfg.augmentation) << " factor=" << aug.augmentation_factor
      << " instances=" << aug.instances.size() << '\n';
  log << "wrote " << path << '\n';
}

void cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  const auto ex = load_examples(cfg);
  TrainConfig tc = cfg.train;
  std::optional<PropensityMatrix> omega;
  if (uses_propensities(tc.loss.variant)) {
    omega = load_propensity(require(cfg.propensity, "propensity"));
    tc.learning_rate = cfg.ips_learning_rate;
  }
  const auto init = make_params(ex.front().list.dim(),
                                static_cast<Eigen::Index>(ex.front().list.size()),
                                cfg.bias_scale, cfg.prior_strength);
  const auto report = train(ex, init, tc, omega ? &*omega : nullptr);
  const auto params_path = out_path(cfg, "params.csv");
  const auto curve_path = out_path(cfg, "train_curve.csv");
  save(params_path, [&](std::ostream& os) { write_params(os, report.final_params); });
  save(curve_path, [&](std::ostream& os) { write_loss_curve(os, report.loss_curve); });
  log << "loss=" << to_string(tc.loss.variant) << " instances=" << ex.size()
      << " epochs=" << tc.epochs << '\n';
  if (!report.loss_curve.empty()) {
    log << "mean loss " << format_double(report.loss_curve.front()) << " -> "
        << format_double(report.loss_curve.back()) << '\n';
  }
  log << "wall time " << report.wall_time << " s\n";
  log << "wrote " << params_path << " and " << curve_path << '\n';
}

void cmd_rerank(const ExperimentConfig& cfg, std::ostream& log) {
  const auto ex = load_examples(cfg);
  const auto params = load_scorer(cfg, ex);
  const RngStream base(cfg.eval_seed, 0);
  std::vector<RunRecord> run;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    auto rng = base.child(i);
    const auto r = rerank(params, ex[i].list, cfg.p_fail, &rng, cfg.step);
    const auto recs = to_run(ex[i].list, r, cfg.tag);
    run.insert(run.end(), recs.begin(), recs.end());
  }
  const auto path = out_path(cfg, "run.txt");
  save(path, [&](std::ostream& os) { write_run(os, run); });
  log << "reranked " << ex.size() << " queries, wrote " << path << '\n';
}

void cmd_eval(const ExperimentConfig& cfg, std::ostream& log) {
  const auto judgments = load_qrels(require(cfg.qrels, "qrels"));
  if (!cfg.run.empty()) {
    const auto run = load_run(cfg.run);
    EvalReport rep;
    rep.per_query = evaluate_run(run, judgments);
    rep.mean_ndcg_at_10 = mean_of(rep.per_query);
    const auto path = out_path(cfg, "eval_run.csv");
    save(path, [&](std::ostream& os) {
      write_eval_report(os, rep, {{"command", "eval"}, {"run", cfg.run},
                                  {"mean_ndcg_at_10", format_double(rep.mean_ndcg_at_10)}});
    });
    log << "mean NDCG@10 " << format_double(rep.mean_ndcg_at_10) << ", wrote " << path << '\n';
    return;
  }
  const auto ex = load_examples(cfg);
  const auto params = load_scorer(cfg, ex);
  const auto lists = lists_of(ex);
  if (cfg.order_mode != "original" && cfg.order_mode != "shuffled" && cfg.order_mode != "both") {
    throw UsageError("order_mode must be original, shuffled or both");
  }
  if (cfg.shuffled_runs < 1) throw UsageError("shuffled_runs must be >= 1");

  auto run_one = [&](OrderMode mode, std::optional<std::uint64_t> stream,
                     const std::string& suffix) {
    std::optional<RngStream> rng;
    if (stream) rng.emplace(cfg.eval_seed, *stream);
    EvalOptions opts;
    opts.mode = mode;
    opts.rng = rng ? &*rng : nullptr;
    opts.p_fail = cfg.p_fail;
    opts.window_step = cfg.step;
    opts.tag = cfg.tag;
    auto rep = evaluate(params, std::span<const CandidateList>(lists), judgments, opts);
    const auto run_path = out_path(cfg, "run_" + suffix + ".txt");
    const auto rep_path = out_path(cfg, "eval_" + suffix + ".csv");
    save(run_path, [&](std::ostream& os) { write_run(os, rep.run); });
    Provenance prov{{"command", "eval"},
                    {"order_mode", std::string(to_string(mode))},
                    {"params", cfg.params},
                    {"p_fail", format_double(cfg.p_fail)},
                    {"mean_ndcg_at_10", format_double(rep.mean_ndcg_at_10)}};
    if (stream) {
      prov.insert(prov.begin() + 2, {"eval_seed", std::to_string(cfg.eval_seed)});
      prov.insert(prov.begin() + 3, {"stream", std::to_string(*stream)});
    }
    save(rep_path, [&](std::ostream& os) { write_eval_report(os, rep, prov); });
    log << to_string(mode) << ' ' << suffix << ": mean NDCG@10 "
        << format_double(rep.mean_ndcg_at_10) << '\n';
    return rep;
  };

  // Without failures the original order needs no randomness.
  const std::optional<std::uint64_t> original_stream =
      cfg.p_fail > 0.0 ? std::optional<std::uint64_t>(0) : std::nullopt;
  if (cfg.order_mode != "shuffled") run_one(OrderMode::Original, original_stream, "original");
  if (cfg.order_mode == "original") return;
  if (cfg.shuffled_runs == 1) {
    run_one(OrderMode::Shuffled, 0, "shuffled");
    return;
  }
  std::vector<EvalReport> reports;
  for (int r = 1; r <= cfg.shuffled_runs; ++r) {
    reports.push_back(run_one(OrderMode::Shuffled, static_cast<std::uint64_t>(r),
                              "shuffled_" + two_digit(r)));
  }
  log << "run variance (pp^2) " << format_double(run_variance(reports)) << '\n';
}

void cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  const auto ex = load_examples(cfg);
  const auto params = load_scorer(cfg, ex);
  const auto judgments = load_qrels(require(cfg.qrels, "qrels"));
  const auto sweep = positional_sweep(params, std::span<const Example>(ex), judgments);
  const auto path = out_path(cfg, "sweep.csv");
  save(path, [&](std::ostream& os) {
    write_sweep(os, sweep, {{"command", "sweep"}, {"params", cfg.params},
                            {"queries", std::to_string(sweep.num_queries)},
                            {"variance", format_double(sweep.variance)}});
  });
  log << "sweep variance " << format_double(sweep.variance) << ", wrote " << path << '\n';
}

void cmd_aggregate(const ExperimentConfig& cfg, std::ostream& log) {
  std::vector<std::string> paths;
  std::stringstream ss(require(cfg.runs, "runs"));
  for (std::string p; std::getline(ss, p, ',');) {
    if (!p.empty()) paths.push_back(p);
  }
  std::vector<std::vector<RunRecord>> runs;
  for (const auto& p : paths) runs.push_back(load_run(p));
  const auto fused = aggregate_runs(runs, cfg.aggregation, cfg.tag, cfg.exact_limit, cfg.rrf_c);
  const auto path = out_path(cfg, "aggregated_run.txt");
  save(path, [&](std::ostream& os) { write_run(os, fused); });
  log << "aggregated " << runs.size() << " runs with " << to_string(cfg.aggregation) << '\n';
  if (!cfg.qrels.empty()) {
    const auto judgments = load_qrels(cfg.qrels);
    double lo = 1.0;
    double mean = 0.0;
    for (const auto& r : runs) {
      const double v = mean_of(evaluate_run(r, judgments));
      lo = std::min(lo, v);
      mean += v / static_cast<double>(runs.size());
    }
    log << "inputs mean NDCG@10 " << format_double(mean) << " (min " << format_double(lo)
        << "), aggregated " << format_double(mean_of(evaluate_run(fused, judgments))) << '\n';
  }
  log << "wrote " << path << '\n';
}

void cmd_benchmark(const ExperimentConfig& cfg, std::ostream& log) {
  const auto bc = BenchmarkConfig::reference();
  const auto data = make_benchmark_data(bc);
  const auto result = run_benchmark(bc, data, standard_variants());
  const auto path = out_path(cfg, "benchmark.csv");
  save(path, [&](std::ostream& os) {
    os << "variant,augmentation,loss,sweep_variance,ndcg_at_position_1,ndcg_at_position_20,"
          "original_ndcg_at_10,shuffled_ndcg_at_10\n";
    for (const auto& v : result.variants) {
      const auto& s = v.sweep.per_position_ndcg;
      os << v.spec.name << ',' << to_string(v.spec.augmentation) << ','
         << to_string(v.spec.loss) << ',' << format_double(v.sweep.variance) << ','
         << format_double(s(0)) << ',' << format_double(s(s.size() - 1)) << ','
         << format_double(v.original.mean_ndcg_at_10) << ','
         << format_double(v.shuffled.mean_ndcg_at_10) << '\n';
    }
  });
  const auto agg_path = out_path(cfg, "aggregation.csv");
  save(agg_path, [&](std::ostream& os) {
    os << "variant,mean_individual,aggregated,gap,min_individual,run_variance\n";
    for (const char* name : {"first", "debiasfirst"}) {
      const auto a = aggregation_study(bc, data, result.get(name).report.final_params);
      os << name << ',' << format_double(a.mean_individual) << ','
         << format_double(a.aggregated) << ',' << format_double(a.gap()) << ','
         << format_double(a.min_individual) << ',' << format_double(a.variance_pp) << '\n';
    }
  });
  const auto prop_path = out_path(cfg, "propensity.csv");
  save(prop_path, [&](std::ostream& os) { write_propensity(os, result.omega); });
  for (const auto& v : result.variants) {
    log << v.spec.name << ": sweep variance " << format_double(v.sweep.variance)
        << ", shuffled NDCG@10 " << format_double(v.shuffled.mean_ndcg_at_10) << '\n';
  }
  log << "wrote " << path << ", " << agg_path << " and " << prop_path << '\n';
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Position-debiased listwise reranking experiments", "debiasrank"};
  std::string config_path;
  bool dump = false;
  app.add_option("--config", config_path, "flat key=value configuration file");
  app.add_flag("--dump-config", dump, "print the effective configuration and exit");
  std::map<std::string, std::string> overrides;
  for (const auto& k : config_keys()) app.add_option("--" + k.name, overrides[k.name], k.help);

  using Command = void (*)(const ExperimentConfig&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"synth", "generate a synthetic candidate set and qrels", cmd_synth},
      {"diagnose", "relevant-position histogram and transition counts", cmd_diagnose},
      {"estimate-propensity", "estimate positional propensities", cmd_estimate_propensity},
      {"augment", "augment candidate lists", cmd_augment},
      {"train", "train the scorer", cmd_train},
      {"rerank", "rerank candidate lists into a TREC run", cmd_rerank},
      {"eval", "NDCG@10 in original and shuffled input order", cmd_eval},
      {"sweep", "positional sweep of the relevant passage", cmd_sweep},
      {"aggregate", "fuse run files", cmd_aggregate},
      {"benchmark", "the reference synthetic benchmark", cmd_benchmark},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : commands) {
    subs.push_back(app.add_subcommand(name, help));
    subs.back()->fallthrough();
  }
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw UsageError(config_path + ": cannot open config file");
      apply_config_file(cfg, is, config_path);
    }
    for (const auto& k : config_keys()) {
      if (app.count("--" + k.name) > 0) set_config_value(cfg, k.name, overrides[k.name]);
    }
    if (dump) {
      dump_config(cfg, out);
      return 0;
    }
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) {
        std::get<2>(commands[i])(cfg, out);
        return 0;
      }
    }
    err << app.help();
    return 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    err << "training diverged: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace debias

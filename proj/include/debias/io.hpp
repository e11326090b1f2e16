#pragma once

// File formats: candidate JSON lines, TREC qrels and runs, and the small CSV
// artifacts (propensities, params, loss curves, reports). Readers report
// malformed input as "<source>:<line>: <reason>".

#include "debias/core.hpp"
#include "debias/eval.hpp"
#include "debias/propensity.hpp"
#include "debias/scorer.hpp"

#include <fstream>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace debias {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Strict full-string double parse; throws DataError naming `what`.
double parse_double(std::string_view s, std::string_view what);
long long parse_int(std::string_view s, std::string_view what);

/// Ordered key=value pairs written as a one-line "# k=v k=v" header.
using Provenance = std::vector<std::pair<std::string, std::string>>;

/// One JSON object per line: {query_id, passages: [{passage_id, features,
/// label?, true_rank?}]}. true_rank carries the training permutation when it
/// is not implied by the labels.
void write_candidates(std::ostream& os, std::span<const Example> examples,
                      bool with_true_rank = true);
/// Truth comes from true_rank when every passage has one, from labels
/// otherwise.
std::vector<Example> read_candidates(std::istream& is, const std::string& source);

void write_qrels(std::ostream& os, const RelevanceJudgments& judgments);
RelevanceJudgments read_qrels(std::istream& is, const std::string& source);

void write_run(std::ostream& os, std::span<const RunRecord> run);
std::vector<RunRecord> read_run(std::istream& is, const std::string& source);

/// input_position,output_rank,omega over the full k x k grid.
void write_propensity(std::ostream& os, const PropensityMatrix& omega);
PropensityMatrix read_propensity(std::istream& is, const std::string& source);

/// input_position,output_rank,count
void write_heatmap(std::ostream& os, const TransitionCounts& counts);

/// name,value rows: bias_scale, content_1..d, position_1..k.
void write_params(std::ostream& os, const Params& params);
Params read_params(std::istream& is, const std::string& source);

void write_loss_curve(std::ostream& os, const std::vector<double>& curve);
void write_sweep(std::ostream& os, const SweepResult& sweep, const Provenance& prov);
void write_eval_report(std::ostream& os, const EvalReport& report, const Provenance& prov);

/// File wrappers; failures to open name the path.
std::vector<Example> load_candidates(const std::string& path);
RelevanceJudgments load_qrels(const std::string& path);
std::vector<RunRecord> load_run(const std::string& path);
PropensityMatrix load_propensity(const std::string& path);
Params load_params(const std::string& path);

std::ofstream open_output(const std::string& path);

/// Opens `path` for writing and hands the stream to `fn`.
template <typename Fn>
void save(const std::string& path, Fn&& fn) {
  auto os = open_output(path);
  fn(os);
  os.flush();
  if (!os) throw DataError(path + ": write failed");
}

}  // namespace debias

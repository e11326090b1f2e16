#include "debias/scorer.hpp"

#include "debias/permute.hpp"
#include "debias/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace debias {

Params make_params(Eigen::Index d, Eigen::Index k, double bias_scale, double prior_strength) {
  Params p;
  p.content_weights = Eigen::VectorXd::Zero(d);
  p.position_weights = Eigen::VectorXd::Zero(k);
  if (k > 1) {
    for (Eigen::Index i = 0; i < k; ++i) {
      p.position_weights(i) =
          -prior_strength * static_cast<double>(i) / static_cast<double>(k - 1);
    }
  }
  p.bias_scale = bias_scale;
  return p;
}

namespace {

constexpr std::uint64_t kDirectionStream = 0xD1EC7104ULL;
constexpr std::uint64_t kQueryStream = 0x51A7ULL;

int draw_position(int k, double skew, RngStream& rng) {
  if (skew == 0.0) return static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k)));
  // truncated geometric via inverse CDF on the normalized weights
  std::vector<double> cdf(static_cast<std::size_t>(k));
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += std::exp(-skew * i);
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  const double u = rng.uniform01() * acc;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(k - 1, static_cast<int>(it - cdf.begin()));
}

}  // namespace

SynthDataset synth_generate(const SynthConfig& cfg) {
  if (cfg.k < 2) throw DataError("synth: k must be >= 2");
  if (cfg.d < 1) throw DataError("synth: d must be >= 1");
  if (cfg.num_queries < 0 || cfg.first_query < 0) {
    throw DataError("synth: num_queries and first_query must be >= 0");
  }
  if (cfg.relevance_position_skew < 0.0 || cfg.noise_sigma < 0.0) {
    throw DataError("synth: skew and noise_sigma must be >= 0");
  }
  if (cfg.label_grades.empty()) throw DataError("synth: label_grades is empty");
  const int top = *std::max_element(cfg.label_grades.begin(), cfg.label_grades.end());
  const int low = *std::min_element(cfg.label_grades.begin(), cfg.label_grades.end());
  if (low < 0 || top <= 0) throw DataError("synth: label_grades needs a positive grade");

  SynthDataset out;
  RngStream dir_rng(cfg.seed, kDirectionStream);
  out.direction.resize(cfg.d);
  for (int j = 0; j < cfg.d; ++j) out.direction(j) = dir_rng.normal();
  out.direction.normalize();

  const RngStream base(cfg.seed, kQueryStream);
  out.examples.reserve(static_cast<std::size_t>(cfg.num_queries));
  for (int q = cfg.first_query; q < cfg.first_query + cfg.num_queries; ++q) {
    auto rng = base.child(static_cast<std::uint64_t>(q));
    CandidateList list;
    list.query_id = "q" + std::to_string(q);
    list.provenance = "synthetic";
    const int rel = draw_position(cfg.k, cfg.relevance_position_skew, rng);
    for (int i = 0; i < cfg.k; ++i) {
      PassageRef p;
      p.passage_id = list.query_id + "_d" + std::to_string(i);
      const int grade = i == rel ? top : low;
      p.features.resize(cfg.d);
      for (int j = 0; j < cfg.d; ++j) p.features(j) = cfg.noise_sigma * rng.normal();
      p.features += static_cast<double>(grade) * out.direction;
      p.relevance_label = grade;
      out.judgments.add(list.query_id, p.passage_id, grade);
      list.passages.push_back(std::move(p));
    }
    // teacher order: grade, then projection on the relevance direction
    std::vector<double> latent(static_cast<std::size_t>(cfg.k));
    for (int i = 0; i < cfg.k; ++i) {
      latent[static_cast<std::size_t>(i)] = list.passages[static_cast<std::size_t>(i)].features.dot(out.direction);
    }
    std::vector<int> order(static_cast<std::size_t>(cfg.k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const int ga = *list.passages[static_cast<std::size_t>(a)].relevance_label;
      const int gb = *list.passages[static_cast<std::size_t>(b)].relevance_label;
      if (ga != gb) return ga > gb;
      return latent[static_cast<std::size_t>(a)] > latent[static_cast<std::size_t>(b)];
    });
    Ranking truth = Ranking::from_order(order);
    out.examples.push_back({std::move(list), std::move(truth)});
  }
  return out;
}

std::vector<int> relevant_positions(const SynthDataset& data) {
  std::vector<int> pos;
  pos.reserve(data.examples.size());
  for (const auto& ex : data.examples) {
    pos.push_back(static_cast<int>(relevant_index(ex.list, data.judgments)) + 1);
  }
  return pos;
}

}  // namespace debias

#include "debias/core.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

namespace debias {

Eigen::MatrixXd CandidateList::feature_matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(passages.size()), dim());
  for (std::size_t i = 0; i < passages.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = passages[i].features.transpose();
  }
  return m;
}

void CandidateList::validate() const {
  if (passages.empty()) {
    throw DataError("query " + query_id + ": empty candidate list");
  }
  std::unordered_set<std::string> seen;
  const auto d = dim();
  for (const auto& p : passages) {
    if (p.passage_id.empty()) {
      throw DataError("query " + query_id + ": empty passage id");
    }
    if (!seen.insert(p.passage_id).second) {
      throw DataError("query " + query_id + ": duplicate passage id " + p.passage_id);
    }
    if (p.features.size() != d) {
      throw DataError("query " + query_id + ": feature dimension mismatch (expected " +
                      std::to_string(d) + ", got " + std::to_string(p.features.size()) +
                      ")");
    }
    if (p.relevance_label && *p.relevance_label < 0) {
      throw DataError("query " + query_id + ": negative label");
    }
  }
}

Ranking::Ranking(std::vector<int> assignment) : assignment_(std::move(assignment)) {
  const auto k = static_cast<int>(assignment_.size());
  std::vector<char> used(assignment_.size() + 1, 0);
  int max_rank = 0;
  for (int r : assignment_) {
    if (r < 0 || r > k) {
      throw DataError("rank " + std::to_string(r) + " outside 0.." + std::to_string(k));
    }
    if (r == 0) continue;
    if (used[static_cast<std::size_t>(r)]) {
      throw DataError("duplicate rank " + std::to_string(r));
    }
    used[static_cast<std::size_t>(r)] = 1;
    ++assigned_;
    max_rank = std::max(max_rank, r);
  }
  if (static_cast<std::size_t>(max_rank) != assigned_) {
    throw DataError("assigned ranks do not form a prefix 1..m");
  }
  partial_ = assigned_ != assignment_.size();
}

Ranking Ranking::identity(std::size_t k) {
  std::vector<int> a(k);
  std::iota(a.begin(), a.end(), 1);
  return Ranking(std::move(a));
}

Ranking Ranking::from_order(std::span<const int> order) {
  std::vector<int> a(order.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const int idx = order[r];
    if (idx < 0 || static_cast<std::size_t>(idx) >= order.size() ||
        a[static_cast<std::size_t>(idx)] != 0) {
      throw DataError("order is not a permutation");
    }
    a[static_cast<std::size_t>(idx)] = static_cast<int>(r) + 1;
  }
  return Ranking(std::move(a));
}

std::vector<int> Ranking::order() const {
  if (partial_) throw DataError("incomplete permutation");
  std::vector<int> o(assignment_.size());
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    o[static_cast<std::size_t>(assignment_[i] - 1)] = static_cast<int>(i);
  }
  return o;
}

void RelevanceJudgments::add(const std::string& query_id, const std::string& passage_id,
                             int grade) {
  if (grade < 0) {
    throw DataError("negative grade for " + query_id + "/" + passage_id);
  }
  if (!entries_.emplace(std::make_pair(query_id, passage_id), grade).second) {
    throw DataError("duplicate judgment for " + query_id + "/" + passage_id);
  }
}

int RelevanceJudgments::grade(const std::string& query_id,
                              const std::string& passage_id) const {
  auto it = entries_.find({query_id, passage_id});
  return it == entries_.end() ? 0 : it->second;
}

bool RelevanceJudgments::contains(const std::string& query_id,
                                  const std::string& passage_id) const {
  return entries_.count({query_id, passage_id}) != 0;
}

void validate_run(std::span<const RunRecord> run) {
  std::map<std::string, std::set<int>> ranks;
  for (const auto& rec : run) {
    if (rec.rank < 1) {
      throw DataError("query " + rec.query_id + ": rank must be >= 1");
    }
    if (!ranks[rec.query_id].insert(rec.rank).second) {
      throw DataError("query " + rec.query_id + ": duplicate rank " +
                      std::to_string(rec.rank));
    }
  }
  for (const auto& [q, rs] : ranks) {
    if (*rs.rbegin() != static_cast<int>(rs.size())) {
      throw DataError("query " + q + ": ranks are not contiguous from 1");
    }
  }
}

Ranking invert_ranking(const Ranking& r) {
  if (r.partial()) throw DataError("incomplete permutation");
  std::vector<int> inv(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    inv[static_cast<std::size_t>(r.rank_of(i) - 1)] = static_cast<int>(i) + 1;
  }
  return Ranking(std::move(inv));
}

long kendall_tau(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size()) {
    throw DataError("kendall_tau: mismatched sizes " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  if (a.partial() || b.partial()) throw DataError("incomplete permutation");
  long discordant = 0;
  const auto& x = a.assignment();
  const auto& y = b.assignment();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if ((x[i] < x[j]) != (y[i] < y[j])) ++discordant;
    }
  }
  return discordant;
}

Ranking complete_ranking(const Ranking& partial) {
  std::vector<int> a = partial.assignment();
  int next = static_cast<int>(partial.assigned_count());
  for (int& r : a) {
    if (r == 0) r = ++next;
  }
  return Ranking(std::move(a));
}

Ranking complete_ranking(const Ranking& partial, const CandidateList& original_order) {
  if (partial.size() != original_order.size()) {
    throw DataError("complete_ranking: ranking has " + std::to_string(partial.size()) +
                    " entries, list has " + std::to_string(original_order.size()));
  }
  return complete_ranking(partial);
}

CandidateList reorder(const CandidateList& list, std::span<const int> order) {
  if (order.size() != list.size()) throw DataError("reorder: size mismatch");
  CandidateList out;
  out.query_id = list.query_id;
  out.query_features = list.query_features;
  out.provenance = list.provenance;
  out.passages.reserve(order.size());
  for (int idx : order) out.passages.push_back(list.passages.at(static_cast<std::size_t>(idx)));
  return out;
}

Ranking reorder(const Ranking& ranking, std::span<const int> order) {
  if (order.size() != ranking.size()) throw DataError("reorder: size mismatch");
  std::vector<int> a(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    a[j] = ranking.rank_of(static_cast<std::size_t>(order[j]));
  }
  return Ranking(std::move(a));
}

Ranking truth_from_labels(const CandidateList& list) {
  std::vector<int> order(list.size());
  std::iota(order.begin(), order.end(), 0);
  auto label = [&](int i) {
    return list.passages[static_cast<std::size_t>(i)].relevance_label.value_or(0);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return label(a) > label(b); });
  return Ranking::from_order(order);
}

}  // namespace debias

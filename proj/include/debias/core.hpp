#pragma once

// Domain model shared by every module: candidate windows, permutations,
// relevance judgments and run records. Positions and ranks are 1-based at
// every interface.

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace debias {

/// Raised for malformed inputs (bad permutations, dimension mismatches, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PassageRef {
  std::string passage_id;
  Eigen::VectorXd features;
  std::optional<int> relevance_label;
};

struct CandidateList {
  std::string query_id;
  std::optional<Eigen::VectorXd> query_features;
  std::vector<PassageRef> passages;
  std::string provenance = "synthetic";

  std::size_t size() const { return passages.size(); }

  /// Feature dimension, 0 for an empty list.
  Eigen::Index dim() const {
    return passages.empty() ? 0 : passages.front().features.size();
  }

  /// k x d matrix, row i holds the features of input position i+1.
  Eigen::MatrixXd feature_matrix() const;

  /// Throws DataError on an empty list, duplicate ids or ragged features.
  void validate() const;
};

/// assignment()[i] is the output rank of the passage at input position i+1.
/// A zero entry marks an unassigned passage (partial ranking).
class Ranking {
 public:
  Ranking() = default;

  /// Validates the invariants; throws DataError when violated.
  explicit Ranking(std::vector<int> assignment);

  static Ranking identity(std::size_t k);

  /// Builds a complete ranking from an order: order[r] is the 0-based
  /// input index placed at rank r+1.
  static Ranking from_order(std::span<const int> order);

  const std::vector<int>& assignment() const { return assignment_; }
  std::size_t size() const { return assignment_.size(); }
  bool partial() const { return partial_; }
  std::size_t assigned_count() const { return assigned_; }

  int rank_of(std::size_t input_index) const { return assignment_[input_index]; }

  /// 0-based input indices in rank order; requires a complete ranking.
  std::vector<int> order() const;

  friend bool operator==(const Ranking& a, const Ranking& b) {
    return a.assignment_ == b.assignment_;
  }

 private:
  std::vector<int> assignment_;
  std::size_t assigned_ = 0;
  bool partial_ = false;
};

class RelevanceJudgments {
 public:
  /// Throws DataError on a negative grade or a duplicate entry.
  void add(const std::string& query_id, const std::string& passage_id, int grade);

  /// Grade of (query, passage); unjudged pairs count as 0.
  int grade(const std::string& query_id, const std::string& passage_id) const;

  bool contains(const std::string& query_id, const std::string& passage_id) const;
  std::size_t size() const { return entries_.size(); }

  const std::map<std::pair<std::string, std::string>, int>& entries() const {
    return entries_;
  }

 private:
  std::map<std::pair<std::string, std::string>, int> entries_;
};

struct RunRecord {
  std::string query_id;
  std::string passage_id;
  int rank = 0;
  double score = 0.0;
  std::string tag;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Checks that ranks within each query are distinct and contiguous from 1.
void validate_run(std::span<const RunRecord> run);

/// One training or evaluation instance: a window and its true permutation.
struct Example {
  CandidateList list;
  Ranking truth;
};

/// Maps rank-of-input to input-at-rank and back. Throws DataError on a
/// partial ranking.
Ranking invert_ranking(const Ranking& r);

/// Number of discordant pairs between two complete rankings of equal size.
long kendall_tau(const Ranking& a, const Ranking& b);

/// Fills unassigned passages with ranks m+1..k in ascending input order.
Ranking complete_ranking(const Ranking& partial, const CandidateList& original_order);
Ranking complete_ranking(const Ranking& partial);

/// Applies a reordering: position j of the result holds list.passages[order[j]].
CandidateList reorder(const CandidateList& list, std::span<const int> order);

/// Carries a ranking through the same reordering so that every passage keeps
/// its rank.
Ranking reorder(const Ranking& ranking, std::span<const int> order);

/// True permutation implied by graded labels: grade descending, then input
/// position ascending. Missing labels count as 0.
Ranking truth_from_labels(const CandidateList& list);

}  // namespace debias

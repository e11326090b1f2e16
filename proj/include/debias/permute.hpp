#pragma once

// Input-order randomization: unbiased shuffles, grouping-and-rotation,
// position-aware augmentation and controlled placement of the relevant
// passage.

#include "debias/core.hpp"
#include "debias/rng.hpp"

#include <string_view>
#include <vector>

namespace debias {

struct AugmentedSet {
  std::vector<Example> instances;
  int augmentation_factor = 1;
};

enum class Augmentation { None, Random, PositionAware };

std::string_view to_string(Augmentation a);
Augmentation parse_augmentation(std::string_view s);

/// Uniformly random permutation of 0..k-1 (Fisher-Yates, descending sweep).
std::vector<int> shuffle_order(std::size_t k, RngStream& rng);

CandidateList fisher_yates_shuffle(const CandidateList& list, RngStream& rng);

/// Group sizes used by group_rotate: the first (k mod n) groups hold
/// ceil(k/n) items, the rest floor(k/n).
std::vector<int> group_sizes(std::size_t k, int n);

/// The n reorderings produced by splitting 0..k-1 into n contiguous groups
/// and rotating the group sequence left by r = 0..n-1.
std::vector<std::vector<int>> group_rotate_orders(std::size_t k, int n);

std::vector<CandidateList> group_rotate(const CandidateList& shuffled, int n);

/// Position-aware augmentation: per instance one Fisher-Yates shuffle
/// followed by group_rotate with n; true permutations travel with their
/// passages. Instance i draws from rng.child(i).
AugmentedSet pos_aug(const std::vector<Example>& dataset, int n, const RngStream& rng);

/// Random augmentation baseline: per instance the original order plus n-1
/// independent Fisher-Yates shuffles.
AugmentedSet rand_aug(const std::vector<Example>& dataset, int n, const RngStream& rng);

AugmentedSet augment(const std::vector<Example>& dataset, Augmentation kind, int n,
                     const RngStream& rng);

/// 0-based input index of the passage treated as "the" relevant one: the
/// highest grade > 0, ties broken by input position. Throws DataError
/// ("no relevant passage") when nothing in the list is judged relevant.
std::size_t relevant_index(const CandidateList& list, const RelevanceJudgments& judgments);

/// Moves the relevant passage to 1-based position p, others keep their
/// relative order.
CandidateList place_relevant_at(const CandidateList& list,
                                const RelevanceJudgments& judgments, int p);

}  // namespace debias

#include "debias/permute.hpp"

#include <numeric>

namespace debias {

std::string_view to_string(Augmentation a) {
  switch (a) {
    case Augmentation::None: return "none";
    case Augmentation::Random: return "rand";
    case Augmentation::PositionAware: return "pos";
  }
  return "none";
}

Augmentation parse_augmentation(std::string_view s) {
  if (s == "none" || s == "noaug") return Augmentation::None;
  if (s == "rand" || s == "randaug") return Augmentation::Random;
  if (s == "pos" || s == "posaug") return Augmentation::PositionAware;
  throw DataError("unknown augmentation '" + std::string(s) + "' (none|rand|pos)");
}

std::vector<int> shuffle_order(std::size_t k, RngStream& rng) {
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = k; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

CandidateList fisher_yates_shuffle(const CandidateList& list, RngStream& rng) {
  const auto order = shuffle_order(list.size(), rng);
  return reorder(list, order);
}

std::vector<int> group_sizes(std::size_t k, int n) {
  if (n <= 0) throw DataError("group_rotate: n must be positive");
  if (static_cast<std::size_t>(n) > k) {
    throw DataError("group_rotate: n=" + std::to_string(n) + " exceeds k=" +
                    std::to_string(k));
  }
  const auto base = static_cast<int>(k / static_cast<std::size_t>(n));
  const auto extra = static_cast<int>(k % static_cast<std::size_t>(n));
  std::vector<int> sizes(static_cast<std::size_t>(n), base);
  for (int g = 0; g < extra; ++g) ++sizes[static_cast<std::size_t>(g)];
  return sizes;
}

std::vector<std::vector<int>> group_rotate_orders(std::size_t k, int n) {
  const auto sizes = group_sizes(k, n);
  std::vector<int> starts(sizes.size());
  std::exclusive_scan(sizes.begin(), sizes.end(), starts.begin(), 0);

  std::vector<std::vector<int>> orders;
  orders.reserve(sizes.size());
  for (std::size_t r = 0; r < sizes.size(); ++r) {
    std::vector<int> order;
    order.reserve(k);
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      const auto src = (g + r) % sizes.size();
      for (int o = 0; o < sizes[src]; ++o) order.push_back(starts[src] + o);
    }
    orders.push_back(std::move(order));
  }
  return orders;
}

std::vector<CandidateList> group_rotate(const CandidateList& shuffled, int n) {
  std::vector<CandidateList> out;
  for (const auto& order : group_rotate_orders(shuffled.size(), n)) {
    out.push_back(reorder(shuffled, order));
  }
  return out;
}

namespace {

void check_uniform_k(const std::vector<Example>& dataset) {
  for (const auto& ex : dataset) {
    if (ex.list.size() != dataset.front().list.size()) {
      throw DataError("augmentation requires a shared window size; query " +
                      ex.list.query_id + " has " + std::to_string(ex.list.size()) +
                      " passages, expected " +
                      std::to_string(dataset.front().list.size()));
    }
    if (ex.truth.size() != ex.list.size()) {
      throw DataError("query " + ex.list.query_id + ": truth size mismatch");
    }
  }
}

}  // namespace

AugmentedSet pos_aug(const std::vector<Example>& dataset, int n, const RngStream& rng) {
  check_uniform_k(dataset);
  AugmentedSet out;
  out.augmentation_factor = n;
  if (dataset.empty()) return out;
  const auto rotations = group_rotate_orders(dataset.front().list.size(), n);
  out.instances.reserve(dataset.size() * rotations.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto stream = rng.child(i);
    const auto& ex = dataset[i];
    const auto shuffle = shuffle_order(ex.list.size(), stream);
    for (const auto& rot : rotations) {
      // composed: new position j holds source passage shuffle[rot[j]]
      std::vector<int> composed(rot.size());
      for (std::size_t j = 0; j < rot.size(); ++j) {
        composed[j] = shuffle[static_cast<std::size_t>(rot[j])];
      }
      out.instances.push_back({reorder(ex.list, composed), reorder(ex.truth, composed)});
    }
  }
  return out;
}

AugmentedSet rand_aug(const std::vector<Example>& dataset, int n, const RngStream& rng) {
  check_uniform_k(dataset);
  if (n <= 0) throw DataError("rand_aug: n must be positive");
  AugmentedSet out;
  out.augmentation_factor = n;
  out.instances.reserve(dataset.size() * static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto stream = rng.child(i);
    const auto& ex = dataset[i];
    out.instances.push_back(ex);
    for (int c = 1; c < n; ++c) {
      const auto order = shuffle_order(ex.list.size(), stream);
      out.instances.push_back({reorder(ex.list, order), reorder(ex.truth, order)});
    }
  }
  return out;
}

AugmentedSet augment(const std::vector<Example>& dataset, Augmentation kind, int n,
                     const RngStream& rng) {
  switch (kind) {
    case Augmentation::PositionAware: return pos_aug(dataset, n, rng);
    case Augmentation::Random: return rand_aug(dataset, n, rng);
    case Augmentation::None: break;
  }
  return AugmentedSet{dataset, 1};
}

std::size_t relevant_index(const CandidateList& list, const RelevanceJudgments& judgments) {
  std::size_t best = list.size();
  int best_grade = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const int g = judgments.grade(list.query_id, list.passages[i].passage_id);
    if (g > best_grade) {
      best_grade = g;
      best = i;
    }
  }
  if (best == list.size()) {
    throw DataError("query " + list.query_id + ": no relevant passage");
  }
  return best;
}

CandidateList place_relevant_at(const CandidateList& list,
                                const RelevanceJudgments& judgments, int p) {
  if (p < 1 || static_cast<std::size_t>(p) > list.size()) {
    throw DataError("place_relevant_at: position " + std::to_string(p) +
                    " outside 1.." + std::to_string(list.size()));
  }
  const auto rel = static_cast<int>(relevant_index(list, judgments));
  std::vector<int> order;
  order.reserve(list.size());
  for (int i = 0; i < static_cast<int>(list.size()); ++i) {
    if (i != rel) order.push_back(i);
  }
  order.insert(order.begin() + (p - 1), rel);
  return reorder(list, order);
}

}  // namespace debias

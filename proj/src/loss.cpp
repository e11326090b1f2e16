#include "debias/loss.hpp"

namespace debias {

std::string_view to_string(LossVariant v) {
  switch (v) {
    case LossVariant::Rank: return "rank";
    case LossVariant::RankIPS: return "rank-ips";
    case LossVariant::LM: return "lm";
    case LossVariant::First: return "first";
    case LossVariant::DebiasFirst: return "debiasfirst";
  }
  return "?";
}

LossVariant parse_loss_variant(std::string_view s) {
  if (s == "rank") return LossVariant::Rank;
  if (s == "rank-ips" || s == "rank_ips") return LossVariant::RankIPS;
  if (s == "lm") return LossVariant::LM;
  if (s == "first") return LossVariant::First;
  if (s == "debiasfirst" || s == "debias-first") return LossVariant::DebiasFirst;
  throw DataError("unknown loss variant '" + std::string(s) +
                  "' (rank|rank-ips|lm|first|debiasfirst)");
}

bool uses_propensities(LossVariant v) {
  return v == LossVariant::RankIPS || v == LossVariant::DebiasFirst;
}

}  // namespace debias

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hybrid/ranking.hpp"
#include "hybrid/synthetic.hpp"

namespace hybrid {

// Average precision of one ranked list: mean of precision-at-hit over all
// relevant items. `exclude` removes one index from both the ranking and
// the relevant set (e.g. the query itself). Returns nullopt when no
// relevant items remain.
std::optional<double> average_precision(std::span<const std::uint32_t> ranked,
                                        std::span<const std::uint32_t> relevant,
                                        std::optional<std::uint32_t> exclude = std::nullopt);

// Mean AP over queries. Queries with no relevant items are excluded from
// the mean with a warning on stderr. `exclude_per_query`, when given, must
// have one entry per query.
double mean_average_precision(const std::vector<RankingResult>& results, const EvalSet& eval,
                              const std::vector<std::uint32_t>* exclude_per_query = nullptr);

}  // namespace hybrid

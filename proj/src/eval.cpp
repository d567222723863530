#include "hybrid/eval.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

namespace hybrid {

std::optional<double> average_precision(std::span<const std::uint32_t> ranked,
                                        std::span<const std::uint32_t> relevant,
                                        std::optional<std::uint32_t> exclude) {
    std::vector<std::uint32_t> rel(relevant.begin(), relevant.end());
    std::sort(rel.begin(), rel.end());
    std::size_t total = rel.size();
    if (exclude && std::binary_search(rel.begin(), rel.end(), *exclude)) --total;
    if (total == 0) return std::nullopt;

    double sum = 0.0;
    std::size_t hits = 0;
    std::size_t position = 0;
    for (const std::uint32_t v : ranked) {
        if (exclude && v == *exclude) continue;
        ++position;
        if (std::binary_search(rel.begin(), rel.end(), v)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(position);
        }
    }
    return sum / static_cast<double>(total);
}

double mean_average_precision(const std::vector<RankingResult>& results, const EvalSet& eval,
                              const std::vector<std::uint32_t>* exclude_per_query) {
    if (results.size() != eval.relevance.size())
        throw std::invalid_argument("mean_average_precision: result count does not match query count");
    if (exclude_per_query && exclude_per_query->size() != results.size())
        throw std::invalid_argument("mean_average_precision: exclusion list length mismatch");

    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t q = 0; q < results.size(); ++q) {
        std::optional<std::uint32_t> exclude;
        if (exclude_per_query) exclude = (*exclude_per_query)[q];
        const auto ap = average_precision(results[q].order, eval.relevance[q], exclude);
        if (!ap) {
            std::cerr << "warning: query " << q << " has no relevant items, excluded from mAP\n";
            continue;
        }
        sum += *ap;
        ++counted;
    }
    return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

}  // namespace hybrid

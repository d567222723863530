#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hybrid/descriptors.hpp"
#include "hybrid/graph.hpp"
#include "hybrid/observation.hpp"
#include "hybrid/spectral.hpp"
#include "hybrid/temporal.hpp"

namespace hybrid {

enum class RankMode { temporal, temporal_truncated, spectral, hybrid };

const char* to_string(RankMode mode);
RankMode rank_mode_from_string(const std::string& name);

struct RankingResult {
    std::vector<double> scores;
    std::vector<std::uint32_t> order;  // scores[order] non-increasing, ties by ascending index
    RankMode mode = RankMode::temporal;
    std::optional<CGReport> report;
};

// Permutation sorting scores descending; equal scores order by index.
std::vector<std::uint32_t> sort_descending(std::span<const double> scores);

// Top-m dataset neighbors of the query with clamped-exponentiated
// weights; ties at rank m break toward the smaller index. Zero weights
// are dropped, so a query orthogonal to everything comes back empty.
ObservationVector build_observation(std::span<const float> query, const DescriptorSet& data,
                                    std::size_t m, int exponent);

// x = U1 g_alpha(Lambda1) U1^T y  +  L_alpha(W - U1 Lambda1 U1^T)^{-1} y.
// An empty basis makes this pure temporal filtering (same code path).
RankingResult hybrid_rank(const SparseGraph& g, const SpectralBasis& basis, const ObservationVector& y,
                          FilterParams p, std::size_t max_iters, double rel_tol);

// FSR baseline: x = U1 h_alpha(Lambda1) U1^T y (note h, not g).
RankingResult spectral_rank_fsr(const SpectralBasis& basis, const ObservationVector& y, FilterParams p);

// Temporal filtering restricted to the query's top-`shortlist` vertices:
// the raw W is truncated to the shortlist and re-normalized, the system is
// solved there, and everything outside the shortlist is appended below the
// shortlist minimum ordered by raw similarity.
RankingResult temporal_rank_truncated(const SparseGraph& raw, const DescriptorSet& data,
                                      std::span<const float> query, std::size_t shortlist,
                                      std::size_t m, int exponent, FilterParams p,
                                      std::size_t max_iters, double rel_tol);

// Lift a ranking computed on the largest component back to all n vertices:
// in-component items keep their scores, out-of-component items are placed
// below the in-component minimum ordered by raw similarity.
RankingResult expand_to_global(const RankingResult& local, const ComponentMap& cm,
                               std::span<const double> global_similarity);

// CSV "rank,vertex_id,score"; binary: u64 n, n u32 ids, n f64 scores.
void write_ranking_csv(const std::string& path, const RankingResult& result);
void write_ranking_binary(const std::string& path, const RankingResult& result);

}  // namespace hybrid

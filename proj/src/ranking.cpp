#include "hybrid/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hybrid/io_util.hpp"

namespace hybrid {

const char* to_string(RankMode mode) {
    switch (mode) {
        case RankMode::temporal: return "temporal";
        case RankMode::temporal_truncated: return "truncated";
        case RankMode::spectral: return "spectral";
        case RankMode::hybrid: return "hybrid";
    }
    return "unknown";
}

RankMode rank_mode_from_string(const std::string& name) {
    if (name == "temporal") return RankMode::temporal;
    if (name == "truncated") return RankMode::temporal_truncated;
    if (name == "spectral") return RankMode::spectral;
    if (name == "hybrid") return RankMode::hybrid;
    throw std::invalid_argument("unknown ranking mode: " + name);
}

std::vector<std::uint32_t> sort_descending(std::span<const double> scores) {
    std::vector<std::uint32_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return order;
}

ObservationVector build_observation(std::span<const float> query, const DescriptorSet& data,
                                    std::size_t m, int exponent) {
    if (m == 0) throw std::invalid_argument("build_observation: m must be positive");
    if (m > data.count) throw std::invalid_argument("build_observation: m exceeds dataset size");
    if (query.size() != data.dim) throw std::invalid_argument("build_observation: query dimension mismatch");
    const double qnorm = std::sqrt(dot(query, query));
    if (std::abs(qnorm - 1.0) > 1e-6)
        throw std::invalid_argument("build_observation: query is not unit-norm");

    const std::vector<double> sims = similarities(query, data);
    std::vector<std::uint32_t> idx(data.count);
    std::iota(idx.begin(), idx.end(), 0u);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (sims[a] != sims[b]) return sims[a] > sims[b];
                          return a < b;
                      });

    std::vector<std::pair<std::uint32_t, double>> kept;
    kept.reserve(m);
    for (std::size_t s = 0; s < m; ++s) {
        const double w = similarity_weight(sims[idx[s]], exponent);
        if (w > 0.0) kept.emplace_back(idx[s], w);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    ObservationVector y;
    y.n = data.count;
    y.indices.reserve(kept.size());
    y.values.reserve(kept.size());
    for (const auto& [i, w] : kept) {
        y.indices.push_back(i);
        y.values.push_back(w);
    }
    return y;
}

RankingResult hybrid_rank(const SparseGraph& g, const SpectralBasis& basis, const ObservationVector& y,
                          FilterParams p, std::size_t max_iters, double rel_tol) {
    if (y.n != g.n) throw std::invalid_argument("hybrid_rank: observation length does not match graph");
    auto [xt, report] = temporal_term(g, basis, y, p, max_iters, rel_tol);

    RankingResult result;
    if (basis.empty()) {
        result.mode = RankMode::temporal;
        result.scores = std::move(xt);
    } else {
        result.mode = RankMode::hybrid;
        result.scores = spectral_term(basis, y, p);
        for (std::size_t i = 0; i < result.scores.size(); ++i) result.scores[i] += xt[i];
    }
    result.order = sort_descending(result.scores);
    result.report = std::move(report);
    return result;
}

RankingResult spectral_rank_fsr(const SpectralBasis& basis, const ObservationVector& y, FilterParams p) {
    validate(p);
    if (!basis.empty() && basis.n != y.n)
        throw std::invalid_argument("spectral_rank_fsr: observation length does not match basis");

    RankingResult result;
    result.mode = RankMode::spectral;
    if (basis.empty()) {
        result.scores.assign(y.n, 0.0);
    } else {
        std::vector<double> t = basis.project(y);
        for (std::size_t j = 0; j < basis.rank; ++j) t[j] *= h_alpha(basis.eigenvalues[j], p);
        result.scores.assign(basis.n, 0.0);
        basis.accumulate(t, result.scores);
    }
    result.order = sort_descending(result.scores);
    return result;
}

namespace {

// Places `tail` items strictly below `floor`, ordered by raw similarity:
// similarity in [-1,1] maps to floor - (3 - s), i.e. [floor-4, floor-2].
void append_tail(std::vector<double>& scores, std::span<const std::uint32_t> tail,
                 std::span<const double> similarity, double floor) {
    for (const std::uint32_t v : tail) scores[v] = floor - (3.0 - similarity[v]);
}

}  // namespace

RankingResult temporal_rank_truncated(const SparseGraph& raw, const DescriptorSet& data,
                                      std::span<const float> query, std::size_t shortlist,
                                      std::size_t m, int exponent, FilterParams p,
                                      std::size_t max_iters, double rel_tol) {
    if (raw.normalized)
        throw std::invalid_argument("temporal_rank_truncated: needs the raw adjacency to re-normalize");
    if (shortlist == 0 || shortlist > raw.n)
        throw std::invalid_argument("temporal_rank_truncated: shortlist must satisfy 1 <= s <= n");
    if (data.count != raw.n)
        throw std::invalid_argument("temporal_rank_truncated: descriptor count does not match graph");

    const std::vector<double> sims = similarities(query, data);
    std::vector<std::uint32_t> idx(raw.n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(shortlist), idx.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (sims[a] != sims[b]) return sims[a] > sims[b];
                          return a < b;
                      });
    std::vector<std::uint32_t> keep(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(shortlist));

    TruncatedGraph sub = truncate_and_renormalize(raw, keep);
    const std::size_t ns = sub.graph.n;

    // observation restricted to the shortlist
    ObservationVector y_local;
    y_local.n = ns;
    {
        const ObservationVector y = build_observation(query, data, std::min(m, raw.n), exponent);
        std::vector<std::uint32_t> to_local(raw.n, ComponentMap::npos);
        for (std::size_t l = 0; l < sub.to_global.size(); ++l) to_local[sub.to_global[l]] = static_cast<std::uint32_t>(l);
        for (std::size_t pos = 0; pos < y.indices.size(); ++pos) {
            const std::uint32_t local = to_local[y.indices[pos]];
            if (local != ComponentMap::npos) {
                y_local.indices.push_back(local);
                y_local.values.push_back(y.values[pos]);
            }
        }
    }

    const SpectralBasis no_basis;
    auto [x_local, report] = temporal_term(sub.graph, no_basis, y_local, p, max_iters, rel_tol);

    RankingResult result;
    result.mode = RankMode::temporal_truncated;
    result.scores.assign(raw.n, 0.0);
    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < ns; ++l) {
        result.scores[sub.to_global[l]] = x_local[l];
        floor = std::min(floor, x_local[l]);
    }

    std::vector<char> in_shortlist(raw.n, 0);
    for (const std::uint32_t v : sub.to_global) in_shortlist[v] = 1;
    std::vector<std::uint32_t> tail;
    tail.reserve(raw.n - ns);
    for (std::uint32_t v = 0; v < raw.n; ++v)
        if (!in_shortlist[v]) tail.push_back(v);
    append_tail(result.scores, tail, sims, floor);

    result.order = sort_descending(result.scores);
    result.report = std::move(report);
    return result;
}

RankingResult expand_to_global(const RankingResult& local, const ComponentMap& cm,
                               std::span<const double> global_similarity) {
    const std::size_t n = cm.component_ids.size();
    if (local.scores.size() != cm.largest_size())
        throw std::invalid_argument("expand_to_global: local score length does not match component");
    if (global_similarity.size() != n)
        throw std::invalid_argument("expand_to_global: similarity length does not match vertex count");

    RankingResult result;
    result.mode = local.mode;
    result.report = local.report;
    result.scores.assign(n, 0.0);
    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < local.scores.size(); ++l) {
        result.scores[cm.to_global[l]] = local.scores[l];
        floor = std::min(floor, local.scores[l]);
    }
    if (local.scores.empty()) floor = 0.0;

    std::vector<std::uint32_t> tail;
    for (std::uint32_t v = 0; v < n; ++v)
        if (cm.to_local[v] == ComponentMap::npos) tail.push_back(v);
    append_tail(result.scores, tail, global_similarity, floor);

    result.order = sort_descending(result.scores);
    return result;
}

void write_ranking_csv(const std::string& path, const RankingResult& result) {
    auto out = io::open_output(path);
    out << std::setprecision(17) << "rank,vertex_id,score\n";
    for (std::size_t r = 0; r < result.order.size(); ++r)
        out << r << "," << result.order[r] << "," << result.scores[result.order[r]] << "\n";
}

void write_ranking_binary(const std::string& path, const RankingResult& result) {
    auto out = io::open_output(path);
    io::write_value<std::uint64_t>(out, result.order.size());
    io::write_span<std::uint32_t>(out, result.order);
    std::vector<double> sorted_scores(result.order.size());
    for (std::size_t r = 0; r < result.order.size(); ++r) sorted_scores[r] = result.scores[result.order[r]];
    io::write_span<double>(out, sorted_scores);
}

}  // namespace hybrid

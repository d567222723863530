#include "hybrid/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hybrid/io_util.hpp"
#include "parallel.hpp"

namespace hybrid {

void SparseGraph::matvec(std::span<const double> x, std::span<double> out) const {
    if (x.size() != n || out.size() != n)
        throw std::invalid_argument("matvec: vector length does not match graph size");
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::uint64_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
            acc += values[p] * x[cols[p]];
        out[i] = acc;
    }
}

std::vector<double> SparseGraph::matvec(std::span<const double> x) const {
    std::vector<double> out(n);
    matvec(x, out);
    return out;
}

std::vector<double> SparseGraph::degrees() const {
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::uint64_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) d[i] += values[p];
    return d;
}

double SparseGraph::entry(std::uint32_t i, std::uint32_t j) const {
    const auto begin = cols.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
    const auto end = cols.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return values[static_cast<std::size_t>(it - cols.begin())];
}

namespace {

SparseGraph from_adjacency(std::size_t n, const std::vector<std::vector<std::pair<std::uint32_t, double>>>& adj,
                           bool normalized) {
    SparseGraph g;
    g.n = n;
    g.normalized = normalized;
    g.row_offsets.resize(n + 1, 0);
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < n; ++i) {
        nnz += adj[i].size();
        g.row_offsets[i + 1] = nnz;
    }
    g.cols.reserve(nnz);
    g.values.reserve(nnz);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [c, v] : adj[i]) {
            g.cols.push_back(c);
            g.values.push_back(v);
        }
    }
    return g;
}

}  // namespace

SparseGraph build_knn_graph(const DescriptorSet& data, std::size_t k, int exponent) {
    validate_unit_rows(data);
    const std::size_t n = data.count;
    if (k == 0 || k >= n)
        throw std::invalid_argument("build_knn_graph: k must satisfy 1 <= k < n");
    if (exponent < 1) throw std::invalid_argument("build_knn_graph: exponent must be >= 1");

    // Brute-force top-k per row; ties at rank k break toward the smaller index.
    std::vector<std::uint32_t> top_idx(n * k);
    std::vector<double> top_sim(n * k);
    detail::parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, std::uint32_t>> cand(n - 1);
        for (std::size_t i = begin; i < end; ++i) {
            const auto vi = data.row(i);
            std::size_t c = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                cand[c++] = {dot(vi, data.row(j)), static_cast<std::uint32_t>(j)};
            }
            std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(),
                              [](const auto& a, const auto& b) {
                                  if (a.first != b.first) return a.first > b.first;
                                  return a.second < b.second;
                              });
            for (std::size_t s = 0; s < k; ++s) {
                top_idx[i * k + s] = cand[s].second;
                top_sim[i * k + s] = cand[s].first;
            }
        }
    });

    // Sorted copies of the neighbor lists for reciprocity lookups.
    std::vector<std::uint32_t> sorted_idx(top_idx);
    for (std::size_t i = 0; i < n; ++i)
        std::sort(sorted_idx.begin() + static_cast<std::ptrdiff_t>(i * k),
                  sorted_idx.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
    const auto knows = [&](std::size_t i, std::uint32_t j) {
        const auto begin = sorted_idx.begin() + static_cast<std::ptrdiff_t>(i * k);
        return std::binary_search(begin, begin + static_cast<std::ptrdiff_t>(k), j);
    };

    // One pass over unordered pairs (i, j > i): reciprocal, nonzero weight.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < k; ++s) {
            const std::uint32_t j = top_idx[i * k + s];
            if (j <= i) continue;
            if (!knows(j, static_cast<std::uint32_t>(i))) continue;
            const double w = similarity_weight(top_sim[i * k + s], exponent);
            if (w == 0.0) continue;
            adj[i].emplace_back(j, w);
            adj[j].emplace_back(static_cast<std::uint32_t>(i), w);
        }
    }
    for (auto& row : adj)
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    return from_adjacency(n, adj, false);
}

SparseGraph symmetric_normalize(const SparseGraph& g) {
    if (g.normalized) throw std::logic_error("symmetric_normalize: graph is already normalized");
    const std::vector<double> d = g.degrees();
    SparseGraph out = g;
    out.normalized = true;
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::uint64_t p = g.row_offsets[i]; p < g.row_offsets[i + 1]; ++p) {
            // d[i]*d[cols[p]] commutes bitwise, so both triangles stay equal
            out.values[p] = g.values[p] / std::sqrt(d[i] * d[g.cols[p]]);
        }
    }
    return out;
}

ComponentMap largest_component(const SparseGraph& g) {
    ComponentMap cm;
    cm.component_ids.assign(g.n, ComponentMap::npos);
    std::vector<std::size_t> counts;
    std::vector<std::uint32_t> queue;

    // BFS in vertex order: label c's minimum vertex index grows with c,
    // so the size tie-break is the smallest qualifying label.
    for (std::size_t v = 0; v < g.n; ++v) {
        if (cm.component_ids[v] != ComponentMap::npos) continue;
        const auto label = static_cast<std::uint32_t>(counts.size());
        counts.push_back(0);
        queue.clear();
        queue.push_back(static_cast<std::uint32_t>(v));
        cm.component_ids[v] = label;
        while (!queue.empty()) {
            const std::uint32_t u = queue.back();
            queue.pop_back();
            ++counts[label];
            for (std::uint64_t p = g.row_offsets[u]; p < g.row_offsets[u + 1]; ++p) {
                const std::uint32_t w = g.cols[p];
                if (cm.component_ids[w] == ComponentMap::npos) {
                    cm.component_ids[w] = label;
                    queue.push_back(w);
                }
            }
        }
    }
    cm.component_count = counts.size();

    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = c;
    cm.largest = static_cast<std::uint32_t>(best);

    cm.to_local.assign(g.n, ComponentMap::npos);
    cm.to_global.reserve(counts.empty() ? 0 : counts[best]);
    for (std::size_t v = 0; v < g.n; ++v) {
        if (cm.component_ids[v] == cm.largest) {
            cm.to_local[v] = static_cast<std::uint32_t>(cm.to_global.size());
            cm.to_global.push_back(static_cast<std::uint32_t>(v));
        }
    }
    return cm;
}

SparseGraph induced_subgraph(const SparseGraph& g, std::span<const std::uint32_t> keep) {
    if (g.normalized)
        throw std::invalid_argument("induced_subgraph: restriction applies to the raw adjacency, not the normalized one");
    if (keep.empty()) throw std::invalid_argument("induced_subgraph: keep set must be nonempty");

    std::vector<std::uint32_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    if (kept.back() >= g.n) throw std::invalid_argument("induced_subgraph: vertex index out of range");

    std::vector<std::uint32_t> to_local(g.n, ComponentMap::npos);
    for (std::size_t l = 0; l < kept.size(); ++l) to_local[kept[l]] = static_cast<std::uint32_t>(l);

    SparseGraph out;
    out.n = kept.size();
    out.normalized = false;
    out.row_offsets.assign(out.n + 1, 0);
    for (std::size_t l = 0; l < kept.size(); ++l) {
        const std::uint32_t v = kept[l];
        for (std::uint64_t p = g.row_offsets[v]; p < g.row_offsets[v + 1]; ++p) {
            if (to_local[g.cols[p]] != ComponentMap::npos) {
                out.cols.push_back(to_local[g.cols[p]]);
                out.values.push_back(g.values[p]);
            }
        }
        out.row_offsets[l + 1] = out.cols.size();
    }
    return out;
}

TruncatedGraph truncate_and_renormalize(const SparseGraph& raw, std::span<const std::uint32_t> keep) {
    SparseGraph sub = induced_subgraph(raw, keep);
    std::vector<std::uint32_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    return {symmetric_normalize(sub), std::move(kept)};
}

namespace {
constexpr char kMagic[9] = "HGRF0001";
}

void save_graph(const std::string& path, const SparseGraph& g) {
    auto out = io::open_output(path);
    io::write_magic(out, kMagic);
    io::write_value<std::uint64_t>(out, g.n);
    io::write_value<std::uint64_t>(out, g.nnz());
    io::write_value<std::uint8_t>(out, g.normalized ? 1 : 0);
    io::write_span<std::uint64_t>(out, g.row_offsets);
    io::write_span<std::uint32_t>(out, g.cols);
    io::write_span<double>(out, g.values);
    if (!out) throw std::runtime_error("failed writing graph file: " + path);
}

SparseGraph load_graph(const std::string& path) {
    auto in = io::open_input(path);
    io::expect_magic(in, kMagic, "graph");
    SparseGraph g;
    g.n = io::read_value<std::uint64_t>(in);
    const auto nnz = io::read_value<std::uint64_t>(in);
    g.normalized = io::read_value<std::uint8_t>(in) != 0;
    g.row_offsets = io::read_vector<std::uint64_t>(in, g.n + 1);
    g.cols = io::read_vector<std::uint32_t>(in, nnz);
    g.values = io::read_vector<double>(in, nnz);
    return g;
}

}  // namespace hybrid

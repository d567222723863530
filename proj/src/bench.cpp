#include "hybrid/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hybrid/eval.hpp"
#include "hybrid/io_util.hpp"

namespace hybrid {

std::size_t graph_storage_bytes(const SparseGraph& g) {
    return g.nnz() * (sizeof(double) + sizeof(std::uint32_t)) + (g.n + 1) * sizeof(std::uint64_t);
}

std::size_t basis_storage_bytes(const SpectralBasis& basis) {
    const std::size_t eigenvalue_bytes = basis.rank * sizeof(double);
    if (basis.sparse)
        return basis.sparse_values.size() * (sizeof(double) + sizeof(std::uint32_t)) +
               basis.col_offsets.size() * sizeof(std::uint64_t) + eigenvalue_bytes;
    return basis.dense.size() * sizeof(double) + eigenvalue_bytes;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

struct CellSetup {
    SpectralBasis basis;  // possibly truncated/sparsified; rank 0 for temporal
};

RankingResult run_query(const BenchInputs& in, const BenchGrid&, RankMode mode, const CellSetup& cell,
                        std::size_t iters, std::size_t shortlist, std::span<const float> query,
                        const ObservationVector& y) {
    const FilterParams p{in.alpha};
    switch (mode) {
        case RankMode::temporal:
        case RankMode::hybrid:
            return hybrid_rank(*in.normalized, cell.basis, y, p, iters, in.rel_tol);
        case RankMode::spectral:
            return spectral_rank_fsr(cell.basis, y, p);
        case RankMode::temporal_truncated:
            return temporal_rank_truncated(*in.raw, *in.data, query,
                                           shortlist == 0 ? in.raw->n : std::min(shortlist, in.raw->n),
                                           in.observation_size, in.exponent, p, iters, in.rel_tol);
    }
    throw std::logic_error("unreachable bench mode");
}

}  // namespace

std::vector<BenchRow> run_benchmark(const BenchInputs& inputs, const BenchGrid& grid) {
    if (!inputs.data || !inputs.raw || !inputs.normalized || !inputs.basis || !inputs.eval)
        throw std::invalid_argument("run_benchmark: all inputs must be provided");

    const std::size_t n_queries = inputs.eval->queries.count;
    std::vector<ObservationVector> observations;
    observations.reserve(n_queries);
    for (std::size_t q = 0; q < n_queries; ++q)
        observations.push_back(build_observation(inputs.eval->queries.row(q), *inputs.data,
                                                 inputs.observation_size, inputs.exponent));

    std::vector<BenchRow> rows;
    for (const RankMode mode : grid.modes) {
        const bool uses_rank = mode == RankMode::hybrid || mode == RankMode::spectral;
        const bool uses_iters = mode != RankMode::spectral;
        const bool uses_sparsity = mode == RankMode::hybrid;
        const bool uses_shortlist = mode == RankMode::temporal_truncated;

        const std::vector<std::size_t> ranks = uses_rank ? grid.ranks : std::vector<std::size_t>{0};
        const std::vector<std::size_t> iters = uses_iters ? grid.iterations : std::vector<std::size_t>{0};
        const std::vector<double> sparsities = uses_sparsity ? grid.sparsities : std::vector<double>{0.0};
        const std::vector<std::size_t> shortlists = uses_shortlist ? grid.shortlists : std::vector<std::size_t>{0};

        for (const std::size_t rank : ranks) {
            if (rank > inputs.basis->rank)
                throw std::invalid_argument("run_benchmark: grid rank exceeds the decomposed rank");
            for (const double sparsity : sparsities) {
                if (rank == 0 && sparsity > 0.0) continue;  // nothing to sparsify
                CellSetup cell;
                cell.basis = inputs.basis->truncated(uses_rank ? rank : 0);
                if (sparsity > 0.0 && cell.basis.rank > 0) cell.basis = sparsify(cell.basis, sparsity);
                for (const std::size_t it_count : iters) {
                    for (const std::size_t shortlist : shortlists) {
                        BenchRow row;
                        row.mode = mode;
                        row.rank = cell.basis.rank;
                        row.iterations = it_count;
                        row.sparsity = cell.basis.rank > 0 ? cell.basis.sparsity : 0.0;
                        row.shortlist = uses_shortlist ? (shortlist == 0 ? inputs.raw->n : shortlist) : 0;
                        row.memory_bytes = graph_storage_bytes(*inputs.raw);
                        if (mode == RankMode::spectral) row.memory_bytes = 0;
                        if (cell.basis.rank > 0 || mode == RankMode::spectral)
                            row.memory_bytes += basis_storage_bytes(cell.basis);

                        std::vector<RankingResult> results(n_queries);
                        if (grid.threads > 1) {
                            // throughput only; per-query latency is not reported
                            std::atomic<std::size_t> cursor{0};
                            const auto start = Clock::now();
                            std::vector<std::thread> pool;
                            for (std::size_t t = 0; t < grid.threads; ++t) {
                                pool.emplace_back([&] {
                                    for (std::size_t q = cursor.fetch_add(1); q < n_queries;
                                         q = cursor.fetch_add(1))
                                        results[q] = run_query(inputs, grid, mode, cell, it_count, shortlist,
                                                               inputs.eval->queries.row(q), observations[q]);
                                });
                            }
                            for (auto& t : pool) t.join();
                            const double total_ms = ms_between(start, Clock::now());
                            row.throughput_qps = total_ms > 0.0 ? 1000.0 * static_cast<double>(n_queries) / total_ms : 0.0;
                        } else {
                            double total_ms = 0.0;
                            for (std::size_t q = 0; q < n_queries; ++q) {
                                const auto start = Clock::now();
                                results[q] = run_query(inputs, grid, mode, cell, it_count, shortlist,
                                                       inputs.eval->queries.row(q), observations[q]);
                                total_ms += ms_between(start, Clock::now());
                            }
                            row.mean_query_ms = n_queries ? total_ms / static_cast<double>(n_queries) : 0.0;
                        }
                        row.map = mean_average_precision(results, *inputs.eval);
                        rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << std::setprecision(10)
        << "mode,rank,iterations,sparsity,shortlist,map,mean_query_ms,throughput_qps,memory_bytes\n";
    for (const auto& row : rows) {
        out << to_string(row.mode) << "," << row.rank << "," << row.iterations << "," << row.sparsity << ","
            << row.shortlist << "," << row.map << "," << row.mean_query_ms << "," << row.throughput_qps << ","
            << row.memory_bytes << "\n";
    }
}

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
    auto out = io::open_output(path);
    write_bench_csv(out, rows);
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first != std::string::npos) items.push_back(item.substr(first, last - first + 1));
    }
    return items;
}

}  // namespace

BenchGrid load_bench_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path);

    BenchGrid grid;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto key = line.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        const auto items = split_list(line.substr(eq + 1));
        if (key == "modes") {
            grid.modes.clear();
            for (const auto& it : items) grid.modes.push_back(rank_mode_from_string(it));
        } else if (key == "ranks") {
            grid.ranks.clear();
            for (const auto& it : items) grid.ranks.push_back(std::stoul(it));
        } else if (key == "iterations") {
            grid.iterations.clear();
            for (const auto& it : items) grid.iterations.push_back(std::stoul(it));
        } else if (key == "sparsities") {
            grid.sparsities.clear();
            for (const auto& it : items) grid.sparsities.push_back(std::stod(it));
        } else if (key == "shortlists") {
            grid.shortlists.clear();
            for (const auto& it : items) grid.shortlists.push_back(std::stoul(it));
        } else if (key == "threads") {
            if (!items.empty()) grid.threads = std::stoul(items.front());
        } else {
            throw std::runtime_error("unknown grid key: " + key);
        }
    }
    if (grid.modes.empty()) throw std::runtime_error("grid file must list at least one mode");
    return grid;
}

}  // namespace hybrid

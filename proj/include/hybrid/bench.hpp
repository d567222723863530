#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hybrid/descriptors.hpp"
#include "hybrid/graph.hpp"
#include "hybrid/ranking.hpp"
#include "hybrid/spectral.hpp"
#include "hybrid/synthetic.hpp"

namespace hybrid {

// Storage footprint used for space-time reporting: float64 values plus
// sparse index overhead; initial descriptors are not counted.
std::size_t graph_storage_bytes(const SparseGraph& g);
std::size_t basis_storage_bytes(const SpectralBasis& basis);

struct BenchInputs {
    const DescriptorSet* data = nullptr;
    const SparseGraph* raw = nullptr;         // W
    const SparseGraph* normalized = nullptr;  // script-W
    const SpectralBasis* basis = nullptr;     // dense, at the maximum rank of the sweep
    const EvalSet* eval = nullptr;
    double alpha = 0.99;
    std::size_t observation_size = 5;
    int exponent = 3;
    double rel_tol = 1e-6;
};

struct BenchGrid {
    std::vector<RankMode> modes;
    std::vector<std::size_t> ranks = {0};
    std::vector<std::size_t> iterations = {20};
    std::vector<double> sparsities = {0.0};
    std::vector<std::size_t> shortlists = {0};  // 0 = n
    std::size_t threads = 1;                    // >1 measures throughput only
};

struct BenchRow {
    RankMode mode;
    std::size_t rank = 0;
    std::size_t iterations = 0;
    double sparsity = 0.0;
    std::size_t shortlist = 0;
    double map = 0.0;
    double mean_query_ms = 0.0;   // sequential diffusion time per query
    double throughput_qps = 0.0;  // only filled in parallel mode
    std::size_t memory_bytes = 0;
};

// Runs every grid cell applicable to its mode. Query timing covers the
// diffusion work only; observation construction is excluded. Queries run
// sequentially unless grid.threads > 1, which reports throughput instead
// of per-query latency.
std::vector<BenchRow> run_benchmark(const BenchInputs& inputs, const BenchGrid& grid);

// CSV: mode,rank,iterations,sparsity,shortlist,map,mean_query_ms,throughput_qps,memory_bytes
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows);

// Parses the key=value grid file for the bench subcommand.
BenchGrid load_bench_grid(const std::string& path);

}  // namespace hybrid

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hybrid/descriptors.hpp"

namespace hybrid {

// Clustered unit vectors standing in for image descriptors: centers
// uniform on the sphere, members re-normalized after isotropic gaussian
// perturbation scaled by `noise`. Deterministic for a fixed seed.
struct SyntheticSpec {
    std::size_t clusters = 10;
    std::size_t points_per_cluster = 100;
    std::size_t dim = 32;
    double noise = 0.2;
    std::uint64_t seed = 42;
};

struct EvalSet {
    DescriptorSet queries;                              // one per cluster
    std::vector<std::vector<std::uint32_t>> relevance;  // per-query relevant indices
};

std::pair<DescriptorSet, EvalSet> generate_synthetic(const SyntheticSpec& spec);

// Relevance file: CSV "query,item", one row per relevant pair.
void save_relevance_csv(const std::string& path, const EvalSet& eval);
std::vector<std::vector<std::uint32_t>> load_relevance_csv(const std::string& path);

}  // namespace hybrid

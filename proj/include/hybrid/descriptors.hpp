#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hybrid {

// n unit-norm d-dimensional vectors, row-major float32 (matching the
// on-disk layout). Similarities are accumulated in double.
struct DescriptorSet {
    std::size_t count = 0;  // n
    std::size_t dim = 0;    // d
    std::vector<float> vectors;

    std::span<const float> row(std::size_t i) const {
        return {vectors.data() + i * dim, dim};
    }
};

// Inner product accumulated in double, sequential over dimensions.
double dot(std::span<const float> a, std::span<const float> b);

// Throws std::invalid_argument if any row norm deviates from 1 by more
// than 1e-6, or if the set is empty.
void validate_unit_rows(const DescriptorSet& data);

// Similarities of `query` against every row of `data`.
std::vector<double> similarities(std::span<const float> query, const DescriptorSet& data);

// clamped-exponentiated similarity weight: max(s,0)^exponent
double similarity_weight(double s, int exponent);

// File format: magic "HDRK0001", u64 n, u64 d, n*d float32 row-major.
void save_descriptors(const std::string& path, const DescriptorSet& data);
DescriptorSet load_descriptors(const std::string& path);

}  // namespace hybrid

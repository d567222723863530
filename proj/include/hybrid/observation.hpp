#pragma once

#include <cstdint>
#include <vector>

namespace hybrid {

// Sparse nonnegative query-to-dataset similarity vector. Indices are
// sorted ascending. A query matching nothing yields an empty vector.
struct ObservationVector {
    std::size_t n = 0;
    std::vector<std::uint32_t> indices;
    std::vector<double> values;

    bool empty() const { return indices.empty(); }
    std::size_t nnz() const { return indices.size(); }

    std::vector<double> densify() const {
        std::vector<double> out(n, 0.0);
        for (std::size_t p = 0; p < indices.size(); ++p) out[indices[p]] = values[p];
        return out;
    }
};

}  // namespace hybrid

#include "hybrid/descriptors.hpp"

#include <cmath>
#include <stdexcept>

#include "hybrid/io_util.hpp"

namespace hybrid {

double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

void validate_unit_rows(const DescriptorSet& data) {
    if (data.count == 0 || data.dim == 0)
        throw std::invalid_argument("descriptor set must have n >= 1 and d >= 1");
    if (data.vectors.size() != data.count * data.dim)
        throw std::invalid_argument("descriptor storage size does not match n*d");
    for (std::size_t i = 0; i < data.count; ++i) {
        const auto r = data.row(i);
        const double norm = std::sqrt(dot(r, r));
        if (std::abs(norm - 1.0) > 1e-6)
            throw std::invalid_argument("descriptor row " + std::to_string(i) +
                                        " is not unit-norm (|v| = " + std::to_string(norm) + ")");
    }
}

std::vector<double> similarities(std::span<const float> query, const DescriptorSet& data) {
    std::vector<double> sims(data.count);
    for (std::size_t i = 0; i < data.count; ++i) sims[i] = dot(query, data.row(i));
    return sims;
}

double similarity_weight(double s, int exponent) {
    const double clamped = s > 0.0 ? s : 0.0;  // (.)_+ before the power
    double w = 1.0;
    for (int e = 0; e < exponent; ++e) w *= clamped;
    return w;
}

namespace {
constexpr char kMagic[9] = "HDRK0001";
}

void save_descriptors(const std::string& path, const DescriptorSet& data) {
    auto out = io::open_output(path);
    io::write_magic(out, kMagic);
    io::write_value<std::uint64_t>(out, data.count);
    io::write_value<std::uint64_t>(out, data.dim);
    io::write_span<float>(out, data.vectors);
    if (!out) throw std::runtime_error("failed writing descriptor file: " + path);
}

DescriptorSet load_descriptors(const std::string& path) {
    auto in = io::open_input(path);
    io::expect_magic(in, kMagic, "descriptor");
    DescriptorSet data;
    data.count = io::read_value<std::uint64_t>(in);
    data.dim = io::read_value<std::uint64_t>(in);
    data.vectors = io::read_vector<float>(in, data.count * data.dim);
    return data;
}

}  // namespace hybrid

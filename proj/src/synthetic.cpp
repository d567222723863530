#include "hybrid/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "hybrid/io_util.hpp"
#include "hybrid/rng.hpp"

namespace hybrid {

namespace {

void unit_normalize(std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
}

void append_as_float(std::vector<float>& out, const std::vector<double>& v) {
    for (double x : v) out.push_back(static_cast<float>(x));
}

}  // namespace

std::pair<DescriptorSet, EvalSet> generate_synthetic(const SyntheticSpec& spec) {
    if (spec.clusters == 0 || spec.points_per_cluster == 0)
        throw std::invalid_argument("generate_synthetic: counts must be >= 1");
    if (spec.dim < 2) throw std::invalid_argument("generate_synthetic: dim must be >= 2");
    if (spec.noise < 0.0) throw std::invalid_argument("generate_synthetic: noise must be nonnegative");

    Rng rng(spec.seed);
    const std::size_t n = spec.clusters * spec.points_per_cluster;

    DescriptorSet data;
    data.count = n;
    data.dim = spec.dim;
    data.vectors.reserve(n * spec.dim);

    EvalSet eval;
    eval.queries.count = spec.clusters;
    eval.queries.dim = spec.dim;
    eval.queries.vectors.reserve(spec.clusters * spec.dim);
    eval.relevance.resize(spec.clusters);

    std::vector<double> center(spec.dim), member(spec.dim);
    const auto perturbed = [&](const std::vector<double>& c) {
        for (std::size_t d = 0; d < spec.dim; ++d) member[d] = c[d] + spec.noise * rng.gaussian();
        unit_normalize(member);
        return member;
    };

    for (std::size_t c = 0; c < spec.clusters; ++c) {
        for (std::size_t d = 0; d < spec.dim; ++d) center[d] = rng.gaussian();
        unit_normalize(center);

        for (std::size_t pt = 0; pt < spec.points_per_cluster; ++pt) {
            append_as_float(data.vectors, perturbed(center));
            eval.relevance[c].push_back(static_cast<std::uint32_t>(c * spec.points_per_cluster + pt));
        }
        append_as_float(eval.queries.vectors, perturbed(center));
    }
    return {std::move(data), std::move(eval)};
}

void save_relevance_csv(const std::string& path, const EvalSet& eval) {
    auto out = io::open_output(path);
    out << "query,item\n";
    for (std::size_t q = 0; q < eval.relevance.size(); ++q)
        for (const std::uint32_t item : eval.relevance[q]) out << q << "," << item << "\n";
}

std::vector<std::vector<std::uint32_t>> load_relevance_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open relevance file: " + path);
    std::vector<std::vector<std::uint32_t>> relevance;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty relevance file: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("malformed relevance row: " + line);
        const auto q = static_cast<std::size_t>(std::stoul(line.substr(0, comma)));
        const auto item = static_cast<std::uint32_t>(std::stoul(line.substr(comma + 1)));
        if (relevance.size() <= q) relevance.resize(q + 1);
        relevance[q].push_back(item);
    }
    return relevance;
}

}  // namespace hybrid

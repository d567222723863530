// Command-line driver: synthetic data generation, graph construction,
// eigendecomposition, ranking, convergence analysis, evaluation, and
// benchmarking over the binary file formats.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hybrid/analysis.hpp"
#include "hybrid/bench.hpp"
#include "hybrid/dense_filter.hpp"
#include "hybrid/eval.hpp"
#include "hybrid/ranking.hpp"
#include "hybrid/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hybrid;

namespace {

struct PipelinePaths {
    std::string dir;
    std::string dataset() const { return dir + "/dataset.hdrk"; }
    std::string queries() const { return dir + "/queries.hdrk"; }
    std::string relevance() const { return dir + "/relevance.csv"; }
    std::string raw_graph() const { return dir + "/graph.w.hgrf"; }
    std::string normalized_graph() const { return dir + "/graph.wn.hgrf"; }
    std::string lcc() const { return dir + "/graph.lcc.csv"; }
    std::string basis() const { return dir + "/basis.heig"; }
};

void save_lcc_csv(const std::string& path, const ComponentMap& cm) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "local,global\n";
    for (std::size_t l = 0; l < cm.to_global.size(); ++l) out << l << "," << cm.to_global[l] << "\n";
}

// Minimal component map (largest component only) for ranking expansion.
ComponentMap load_lcc_csv(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    ComponentMap cm;
    cm.largest = 0;
    cm.component_ids.assign(n, 1);
    cm.to_local.assign(n, ComponentMap::npos);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const auto global = static_cast<std::uint32_t>(std::stoul(line.substr(comma + 1)));
        cm.component_ids[global] = 0;
        cm.to_local[global] = static_cast<std::uint32_t>(cm.to_global.size());
        cm.to_global.push_back(global);
    }
    cm.component_count = cm.to_global.size() == n ? 1 : 2;
    return cm;
}

DescriptorSet restrict_descriptors(const DescriptorSet& data, const std::vector<std::uint32_t>& keep) {
    DescriptorSet out;
    out.count = keep.size();
    out.dim = data.dim;
    out.vectors.reserve(out.count * out.dim);
    for (const std::uint32_t v : keep) {
        const auto row = data.row(v);
        out.vectors.insert(out.vectors.end(), row.begin(), row.end());
    }
    return out;
}

ObservationVector restrict_observation(const ObservationVector& y, const ComponentMap& cm) {
    ObservationVector local;
    local.n = cm.to_global.size();
    for (std::size_t p = 0; p < y.indices.size(); ++p) {
        const std::uint32_t l = cm.to_local[y.indices[p]];
        if (l != ComponentMap::npos) {
            local.indices.push_back(l);
            local.values.push_back(y.values[p]);
        }
    }
    return local;
}

void write_multi_ranking_csv(const std::string& path, const std::vector<RankingResult>& results) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << std::setprecision(17) << "query,rank,vertex_id,score\n";
    for (std::size_t q = 0; q < results.size(); ++q)
        for (std::size_t r = 0; r < results[q].order.size(); ++r)
            out << q << "," << r << "," << results[q].order[r] << ","
                << results[q].scores[results[q].order[r]] << "\n";
}

std::vector<RankingResult> load_multi_ranking_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<RankingResult> results;
    std::string line;
    std::getline(in, line);  // header
    const bool has_query_column = line.rfind("query,", 0) == 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t q = 0;
        std::string rest = line;
        if (has_query_column) {
            const auto c = rest.find(',');
            q = std::stoul(rest.substr(0, c));
            rest = rest.substr(c + 1);
        }
        const auto c1 = rest.find(',');
        const auto c2 = rest.find(',', c1 + 1);
        const auto vertex = static_cast<std::uint32_t>(std::stoul(rest.substr(c1 + 1, c2 - c1 - 1)));
        const double score = std::stod(rest.substr(c2 + 1));
        if (results.size() <= q) results.resize(q + 1);
        results[q].order.push_back(vertex);
        results[q].scores.push_back(score);  // scores in rank order; enough for evaluation
    }
    return results;
}

int run_gen(const SyntheticSpec& spec, const std::string& out_dir) {
    fs::create_directories(out_dir);
    PipelinePaths paths{out_dir};
    const auto [data, eval] = generate_synthetic(spec);
    save_descriptors(paths.dataset(), data);
    save_descriptors(paths.queries(), eval.queries);
    save_relevance_csv(paths.relevance(), eval);
    std::cout << "wrote " << data.count << " descriptors (d=" << data.dim << "), " << eval.queries.count
              << " queries to " << out_dir << "\n";
    return 0;
}

int run_graph(const std::string& data_path, std::size_t k, int exponent, const std::string& out_dir) {
    fs::create_directories(out_dir);
    PipelinePaths paths{out_dir};
    const DescriptorSet data = load_descriptors(data_path);
    const SparseGraph full = build_knn_graph(data, k, exponent);
    const ComponentMap cm = largest_component(full);

    // restrict to the largest component, keep the raw weights for
    // truncation, and normalize for everything else
    const SparseGraph raw =
        cm.largest_size() == full.n ? full : induced_subgraph(full, cm.to_global);
    const SparseGraph normalized = symmetric_normalize(raw);

    save_graph(paths.raw_graph(), raw);
    save_graph(paths.normalized_graph(), normalized);
    save_lcc_csv(paths.lcc(), cm);
    std::cout << "graph: n=" << full.n << " nnz=" << full.nnz() << " components=" << cm.component_count
              << " largest=" << cm.largest_size() << "\n";
    return 0;
}

int run_decompose(const std::string& graph_path, std::size_t rank, double sparsity, double tol,
                  const std::string& out_path) {
    const SparseGraph g = load_graph(graph_path);
    LanczosOptions opts;
    opts.tol = tol;
    SpectralBasis basis = top_eigenpairs(g, rank, opts);
    if (sparsity > 0.0) basis = sparsify(basis, sparsity);
    save_basis(out_path, basis);
    std::cout << "basis: n=" << basis.n << " rank=" << basis.rank << " sparsity=" << basis.sparsity;
    if (basis.rank > 0)
        std::cout << " lambda_1=" << basis.eigenvalues.front() << " lambda_r=" << basis.eigenvalues.back();
    std::cout << "\n";
    return 0;
}

struct RankArgs {
    std::string mode = "hybrid";
    std::string data_dir;
    std::string basis_path;
    std::string queries_path;
    std::string out_csv;
    std::string out_binary;
    std::string report_csv;
    double alpha = 0.99;
    std::size_t iters = 20;
    double tol = 1e-6;
    std::size_t rank = SIZE_MAX;  // truncate the stored basis when set
    double sparsity = 0.0;        // sparsify the loaded basis when > 0
    std::size_t shortlist = 0;    // 0 = whole graph
    std::size_t observation = 5;
    int exponent = 3;
    int query_index = -1;
};

int run_rank(const RankArgs& args) {
    PipelinePaths paths{args.data_dir};
    const RankMode mode = rank_mode_from_string(args.mode);
    const DescriptorSet data = load_descriptors(paths.dataset());
    const DescriptorSet queries =
        load_descriptors(args.queries_path.empty() ? paths.queries() : args.queries_path);
    const FilterParams p{args.alpha};

    const ComponentMap cm = load_lcc_csv(paths.lcc(), data.count);
    const bool reduced = cm.to_global.size() != data.count;
    const DescriptorSet lcc_data = reduced ? restrict_descriptors(data, cm.to_global) : DescriptorSet{};
    const DescriptorSet& graph_data = reduced ? lcc_data : data;

    SparseGraph raw, normalized;
    SpectralBasis basis;
    basis.n = cm.to_global.size();
    if (mode == RankMode::temporal_truncated) raw = load_graph(paths.raw_graph());
    if (mode == RankMode::temporal || mode == RankMode::hybrid)
        normalized = load_graph(paths.normalized_graph());
    if (mode == RankMode::hybrid || mode == RankMode::spectral) {
        basis = load_basis(args.basis_path.empty() ? paths.basis() : args.basis_path);
        if (args.rank != SIZE_MAX) basis = basis.truncated(args.rank);
        if (args.sparsity > 0.0 && !basis.sparse) basis = sparsify(basis, args.sparsity);
    }
    if (mode == RankMode::temporal) basis = SpectralBasis{};  // empty, n irrelevant

    std::vector<std::size_t> query_ids;
    if (args.query_index >= 0)
        query_ids.push_back(static_cast<std::size_t>(args.query_index));
    else
        for (std::size_t q = 0; q < queries.count; ++q) query_ids.push_back(q);

    std::vector<RankingResult> results;
    for (const std::size_t q : query_ids) {
        const auto query = queries.row(q);
        const ObservationVector y_global = build_observation(query, data, args.observation, args.exponent);

        RankingResult local;
        switch (mode) {
            case RankMode::temporal:
            case RankMode::hybrid: {
                const ObservationVector y = reduced ? restrict_observation(y_global, cm) : y_global;
                local = hybrid_rank(normalized, basis, y, p, args.iters, args.tol);
                break;
            }
            case RankMode::spectral: {
                const ObservationVector y = reduced ? restrict_observation(y_global, cm) : y_global;
                local = spectral_rank_fsr(basis, y, p);
                break;
            }
            case RankMode::temporal_truncated: {
                const std::size_t s = args.shortlist == 0 ? raw.n : args.shortlist;
                local = temporal_rank_truncated(raw, graph_data, query, s, args.observation,
                                                args.exponent, p, args.iters, args.tol);
                break;
            }
        }
        if (reduced) {
            const auto sims = similarities(query, data);
            results.push_back(expand_to_global(local, cm, sims));
        } else {
            results.push_back(std::move(local));
        }
    }

    if (!args.out_csv.empty()) {
        if (args.query_index >= 0)
            write_ranking_csv(args.out_csv, results.front());
        else
            write_multi_ranking_csv(args.out_csv, results);
        std::cout << "wrote rankings for " << results.size() << " queries to " << args.out_csv << "\n";
    }
    if (!args.out_binary.empty()) {
        if (args.query_index < 0)
            throw std::runtime_error("--binary requires --query-index (single-query format)");
        write_ranking_binary(args.out_binary, results.front());
    }
    if (!args.report_csv.empty()) {
        if (results.front().report)
            write_cg_report_csv(args.report_csv, *results.front().report);
        else
            std::cerr << "warning: mode " << args.mode << " produces no CG report\n";
    }
    return 0;
}

int run_eval(const std::string& rankings_path, const std::string& relevance_path) {
    const auto results = load_multi_ranking_csv(rankings_path);
    EvalSet eval;
    eval.relevance = load_relevance_csv(relevance_path);
    if (eval.relevance.size() < results.size()) eval.relevance.resize(results.size());
    const double map = mean_average_precision(results, eval);
    std::cout << std::setprecision(10) << "mAP " << map << " over " << results.size() << " queries\n";
    return 0;
}

int run_bench(const std::string& grid_path, const std::string& data_dir, const std::string& basis_path,
              double alpha, std::size_t observation, int exponent, double tol, const std::string& out_path) {
    PipelinePaths paths{data_dir};
    const DescriptorSet data = load_descriptors(paths.dataset());
    const SparseGraph raw = load_graph(paths.raw_graph());
    const SparseGraph normalized = load_graph(paths.normalized_graph());
    const SpectralBasis basis = load_basis(basis_path.empty() ? paths.basis() : basis_path);
    EvalSet eval;
    eval.queries = load_descriptors(paths.queries());
    eval.relevance = load_relevance_csv(paths.relevance());

    if (largest_component(raw).largest_size() != data.count)
        std::cerr << "warning: bench assumes the graph covers the whole dataset\n";

    BenchInputs inputs;
    inputs.data = &data;
    inputs.raw = &raw;
    inputs.normalized = &normalized;
    inputs.basis = &basis;
    inputs.eval = &eval;
    inputs.alpha = alpha;
    inputs.observation_size = observation;
    inputs.exponent = exponent;
    inputs.rel_tol = tol;

    const BenchGrid grid = load_bench_grid(grid_path);
    const auto rows = run_benchmark(inputs, grid);
    if (out_path.empty())
        write_bench_csv(std::cout, rows);
    else
        write_bench_csv(out_path, rows);
    std::cout << "ran " << rows.size() << " benchmark cells\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid spectral-temporal graph filtering for manifold ranking"};
    app.set_config("--config", "",
                   "key=value config file with [subcommand] sections; command-line flags take precedence");
    app.require_subcommand(1);

    // gen
    SyntheticSpec spec;
    std::string out_dir = ".";
    auto* gen = app.add_subcommand("gen", "generate synthetic clustered descriptors");
    gen->add_option("--clusters", spec.clusters, "number of clusters");
    gen->add_option("--per-cluster", spec.points_per_cluster, "points per cluster");
    gen->add_option("--dim", spec.dim, "descriptor dimension");
    gen->add_option("--noise", spec.noise, "angular noise scale");
    gen->add_option("--seed", spec.seed, "RNG seed");
    gen->add_option("--out", out_dir, "output directory")->required();

    // graph
    std::string data_path;
    std::size_t k = 50;
    int exponent = 3;
    auto* graph = app.add_subcommand("graph", "build the reciprocal-kNN graph, normalize, extract LCC");
    graph->add_option("--data", data_path, "descriptor file")->required();
    graph->add_option("--k", k, "neighbors per vertex");
    graph->add_option("--exponent", exponent, "similarity exponent");
    graph->add_option("--out", out_dir, "output directory")->required();

    // decompose
    std::string graph_path, basis_out;
    std::size_t rank = 0;
    double sparsity = 0.0, lanczos_tol = 1e-8;
    auto* decompose = app.add_subcommand("decompose", "top-r eigendecomposition of the normalized graph");
    decompose->add_option("--graph", graph_path, "normalized graph file")->required();
    decompose->add_option("--rank", rank, "number of eigenpairs")->required();
    decompose->add_option("--sparsity", sparsity, "zero fraction for the eigenvector matrix");
    decompose->add_option("--tol", lanczos_tol, "eigenpair residual tolerance");
    decompose->add_option("--out", basis_out, "output basis file")->required();

    // rank
    RankArgs rank_args;
    auto* rank_cmd = app.add_subcommand("rank", "rank dataset items for each query");
    rank_cmd->add_option("--mode", rank_args.mode, "temporal|truncated|spectral|hybrid");
    rank_cmd->add_option("--data", rank_args.data_dir, "pipeline directory")->required();
    rank_cmd->add_option("--basis", rank_args.basis_path, "basis file (default <data>/basis.heig)");
    rank_cmd->add_option("--queries", rank_args.queries_path, "query descriptors");
    rank_cmd->add_option("--alpha", rank_args.alpha, "diffusion strength in [0,1)");
    rank_cmd->add_option("--iters", rank_args.iters, "CG iteration budget");
    rank_cmd->add_option("--tol", rank_args.tol, "CG relative residual tolerance");
    rank_cmd->add_option("--rank", rank_args.rank, "use only the top-r eigenpairs of the basis");
    rank_cmd->add_option("--sparsity", rank_args.sparsity, "sparsify the loaded basis before ranking");
    rank_cmd->add_option("--shortlist", rank_args.shortlist, "shortlist size for truncated mode");
    rank_cmd->add_option("--observation", rank_args.observation, "observation vector nonzeros");
    rank_cmd->add_option("--exponent", rank_args.exponent, "similarity exponent");
    rank_cmd->add_option("--query-index", rank_args.query_index, "rank a single query");
    rank_cmd->add_option("--out", rank_args.out_csv, "rankings CSV");
    rank_cmd->add_option("--binary", rank_args.out_binary, "single-query binary ranking output");
    rank_cmd->add_option("--report", rank_args.report_csv, "CG residual CSV for the first query");

    // analyze
    std::string spectrum_out, spectrum_in, contour_out;
    double alpha = 0.99;
    std::size_t r_max = 0, i_max = 20;
    double lambda_min = std::numeric_limits<double>::quiet_NaN();
    bool contour = false;
    std::string analyze_basis;
    auto* analyze = app.add_subcommand("analyze", "spectrum export and space-time trade-off contours");
    analyze->add_option("--graph", graph_path, "normalized graph (dense spectrum source, n <= 2048)");
    analyze->add_option("--basis", analyze_basis, "basis file as spectrum source (use with --lambda-min)");
    analyze->add_option("--spectrum-out", spectrum_out, "write the spectrum CSV here");
    analyze->add_flag("--contour", contour, "emit the phi_i(r) contour grid");
    analyze->add_option("--spectrum", spectrum_in, "spectrum CSV (j,lambda) input");
    analyze->add_option("--alpha", alpha, "diffusion strength");
    analyze->add_option("--rmax", r_max, "largest rank in the grid");
    analyze->add_option("--imax", i_max, "largest iteration in the grid");
    analyze->add_option("--lambda-min", lambda_min, "lower bound for the smallest eigenvalue");
    analyze->add_option("--out", contour_out, "contour CSV output");

    // eval
    std::string rankings_path, relevance_path;
    bool want_map = false;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate rankings against a relevance file");
    eval_cmd->add_flag("--map", want_map, "report mean average precision");
    eval_cmd->add_option("--rankings", rankings_path, "rankings CSV from the rank subcommand")->required();
    eval_cmd->add_option("--relevance", relevance_path, "relevance CSV (query,item)")->required();

    // bench
    std::string grid_path, bench_out, bench_basis;
    double bench_alpha = 0.99, bench_tol = 1e-6;
    std::size_t bench_observation = 5;
    int bench_exponent = 3;
    auto* bench = app.add_subcommand("bench", "mAP/time/memory sweeps over a parameter grid");
    bench->add_option("--grid", grid_path, "key=value grid file")->required();
    bench->add_option("--data", out_dir, "pipeline directory")->required();
    bench->add_option("--basis", bench_basis, "basis file (default <data>/basis.heig)");
    bench->add_option("--alpha", bench_alpha, "diffusion strength");
    bench->add_option("--observation", bench_observation, "observation vector nonzeros");
    bench->add_option("--exponent", bench_exponent, "similarity exponent");
    bench->add_option("--tol", bench_tol, "CG relative residual tolerance");
    bench->add_option("--out", bench_out, "benchmark CSV (stdout when omitted)");

    for (CLI::App* sub : {gen, graph, decompose, rank_cmd, analyze, eval_cmd, bench}) sub->configurable();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen(spec, out_dir);
        if (graph->parsed()) return run_graph(data_path, k, exponent, out_dir);
        if (decompose->parsed()) return run_decompose(graph_path, rank, sparsity, lanczos_tol, basis_out);
        if (rank_cmd->parsed()) return run_rank(rank_args);
        if (analyze->parsed()) {
            SpectrumSummary spectrum;
            if (!graph_path.empty()) {
                spectrum = dense_spectrum(load_graph(graph_path));
            } else if (!analyze_basis.empty()) {
                const SpectralBasis b = load_basis(analyze_basis);
                spectrum.eigenvalues = b.eigenvalues;
                spectrum.lambda_min_override = -1.0;  // always valid for a normalized graph
            } else if (!spectrum_in.empty()) {
                spectrum = load_spectrum_csv(spectrum_in);
            }
            if (!spectrum_out.empty() && !spectrum.eigenvalues.empty()) {
                write_spectrum_csv(spectrum_out, spectrum);
                std::cout << "wrote spectrum (" << spectrum.eigenvalues.size() << " values) to "
                          << spectrum_out << "\n";
            }
            if (contour) {
                if (spectrum.eigenvalues.empty())
                    throw std::runtime_error("contour needs --graph or --spectrum");
                if (!std::isnan(lambda_min)) spectrum.lambda_min_override = lambda_min;
                const ContourGrid grid = tradeoff_contour(spectrum, alpha, r_max, i_max);
                if (contour_out.empty())
                    write_contour_csv(std::cout, grid);
                else
                    write_contour_csv(contour_out, grid);
            }
            return 0;
        }
        if (eval_cmd->parsed()) {
            if (!want_map) throw std::runtime_error("eval currently only supports --map");
            return run_eval(rankings_path, relevance_path);
        }
        if (bench->parsed())
            return run_bench(grid_path, out_dir, bench_basis, bench_alpha, bench_observation,
                             bench_exponent, bench_tol, bench_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

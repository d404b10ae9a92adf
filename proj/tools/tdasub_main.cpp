// tdasub: persistent-homology subsampling pipelines on point clouds.
//
// Commands: gen, diagram, average, closest, dissimilarity,
// verify {stability-wasserstein, stability-hausdorff, risk-curves, outlier, bounds}.
// Exit codes: 0 ok / no violation, 1 verification violated, 2 usage or
// validation error, 3 resource budget exceeded.  Logs go to stderr only;
// artifacts are deterministic and byte-identical across re-runs.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tda/common.hpp"
#include "tda/estimators.hpp"
#include "tda/kernels.hpp"
#include "tda/landscape.hpp"
#include "tda/persistence.hpp"
#include "tda/pointcloud.hpp"
#include "tda/rips.hpp"
#include "tda/robust.hpp"
#include "tda/rng.hpp"
#include "tda/transport.hpp"

namespace {

constexpr const char* kVersion = "tdasub 1.0.0";

using tda::format_double;

std::string json_bool(bool b) { return b ? "true" : "false"; }

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    tda::require(out.good(), "io", "cannot open " + path + " for writing");
    out << content;
    tda::require(out.good(), "io", "failed writing " + path);
}

void log_kv(const std::string& key, const std::string& value) {
    std::cerr << "config: " << key << "=" << value << "\n";
}

// ---- shared option groups ----------------------------------------------------

struct InputOpts {
    std::string points_path;
    std::string matrix_path;

    void add(CLI::App* cmd) {
        auto* a = cmd->add_option("--in", points_path, "Input point CSV (rows = points)");
        auto* b = cmd->add_option("--matrix-in", matrix_path, "Input distance-matrix CSV");
        a->excludes(b);
    }

    tda::PointCloud load() const {
        tda::require(points_path.empty() != matrix_path.empty(), "validation",
                     "provide exactly one of --in / --matrix-in");
        if (!points_path.empty()) {
            log_kv("in", points_path);
            return tda::read_point_csv(points_path);
        }
        log_kv("matrix-in", matrix_path);
        return tda::read_matrix_csv(matrix_path);
    }
};

struct PipelineOpts {
    int max_dim = 1;
    std::string policy = "enclosing";
    double threshold = 0.0;
    double budget = 5e7;
    int dim = 1;
    std::size_t depth = 1;
    std::size_t grid = 1024;
    double t_max = 0.0;
    unsigned threads = tda::hardware_jobs();

    void add(CLI::App* cmd) {
        cmd->add_option("--max-dim", max_dim, "Maximum homology dimension")->capture_default_str();
        cmd->add_option("--threshold-policy", policy, "Rips threshold policy: enclosing|diameter|fixed")
            ->check(CLI::IsMember({"enclosing", "diameter", "fixed"}))
            ->capture_default_str();
        cmd->add_option("--threshold", threshold, "Rips threshold (policy fixed)")->capture_default_str();
        cmd->add_option("--budget", budget, "Simplex-count budget")->capture_default_str();
        cmd->add_option("--dim", dim, "Landscape homology dimension")->capture_default_str();
        cmd->add_option("--depth", depth, "Landscape layers K")->capture_default_str();
        cmd->add_option("--grid", grid, "Landscape grid columns G")->capture_default_str();
        cmd->add_option("--t-max", t_max, "Grid endpoint T (0 = 2 x input diameter)")->capture_default_str();
        cmd->add_option("--threads", threads, "Worker thread cap")->capture_default_str();
    }

    tda::PipelineParams params() const {
        tda::PipelineParams p;
        p.rips.max_dim = max_dim;
        if (policy == "enclosing") p.rips.policy = tda::RipsParams::ThresholdPolicy::enclosing;
        else if (policy == "diameter") p.rips.policy = tda::RipsParams::ThresholdPolicy::diameter;
        else p.rips.policy = tda::RipsParams::ThresholdPolicy::fixed;
        p.rips.threshold_value = threshold;
        p.rips.budget = budget;
        p.landscape_dim = dim;
        p.depth = depth;
        p.grid = grid;
        p.t_max = t_max;
        p.threads = threads;
        return p;
    }

    void echo() const {
        log_kv("max-dim", std::to_string(max_dim));
        log_kv("threshold-policy", policy);
        if (policy == "fixed") log_kv("threshold", format_double(threshold));
        log_kv("budget", format_double(budget));
        log_kv("dim", std::to_string(dim));
        log_kv("depth", std::to_string(depth));
        log_kv("grid", std::to_string(grid));
        log_kv("t-max", format_double(t_max));
        log_kv("threads", std::to_string(threads));
    }
};

struct SamplingOpts {
    std::size_t m = 100;
    std::size_t n = 30;
    std::uint64_t seed = 0;
    bool no_replacement = false;

    void add(CLI::App* cmd, std::size_t default_m, std::size_t default_n) {
        m = default_m;
        n = default_n;
        cmd->add_option("--m", m, "Points per subsample")->capture_default_str();
        cmd->add_option("--n", n, "Number of subsamples")->capture_default_str();
        cmd->add_option("--seed", seed, "Subsampling seed")->capture_default_str();
        cmd->add_flag("--no-replacement", no_replacement, "Sample without replacement");
    }

    tda::SubsampleScheme scheme() const {
        tda::SubsampleScheme s;
        s.m = m;
        s.n = n;
        s.seed = seed;
        s.replacement = !no_replacement;
        return s;
    }

    void echo() const {
        log_kv("m", std::to_string(m));
        log_kv("n", std::to_string(n));
        log_kv("seed", std::to_string(seed));
        log_kv("replacement", no_replacement ? "false" : "true");
    }
};

struct FilterOpts {
    std::string method = "none";
    double bandwidth = 0.1;
    std::string kernel = "gaussian";
    bool normalized = false;
    std::size_t k = 5;
    double score_threshold = 0.0;
    bool has_threshold = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--filter", method, "Outlier pre-filter: none|kde|knn")
            ->check(CLI::IsMember({"none", "kde", "knn"}))
            ->capture_default_str();
        cmd->add_option("--filter-bandwidth", bandwidth, "KDE bandwidth")->capture_default_str();
        cmd->add_option("--filter-kernel", kernel, "KDE kernel: gaussian|epanechnikov")
            ->check(CLI::IsMember({"gaussian", "epanechnikov"}))
            ->capture_default_str();
        cmd->add_flag("--filter-normalized", normalized, "Use the normalized density");
        cmd->add_option("--filter-k", k, "kNN score neighbor index")->capture_default_str();
        cmd->add_option("--filter-score-threshold", score_threshold,
                        "Keep points with score strictly above this")
            ->each([this](const std::string&) { has_threshold = true; });
    }

    tda::PointCloud apply(tda::PointCloud cloud) const {
        if (method == "none") return cloud;
        tda::require(has_threshold, "validation", "--filter requires --filter-score-threshold");
        std::vector<double> scores;
        if (method == "kde") {
            tda::KdeParams kp;
            kp.bandwidth = bandwidth;
            kp.kernel = tda::kernel_type_from_name(kernel);
            kp.normalized = normalized;
            scores = tda::kde_scores(cloud, kp);
        } else {
            scores = tda::knn_scores(cloud, k);
        }
        tda::FilterResult fr = tda::filtered_cloud(cloud, scores, score_threshold);
        std::cerr << "filter: kept " << fr.kept.size() << " of " << cloud.size() << " points (score range ["
                  << format_double(fr.min_score) << ", " << format_double(fr.max_score) << "])\n";
        return std::move(fr.cloud);
    }
};

// ---- report helpers -----------------------------------------------------------

std::string diagnostics_json(const std::vector<tda::SubsampleDiagnostic>& diags) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < diags.size(); ++i) {
        if (i) os << ",";
        os << "{\"index\": " << diags[i].index;
        if (diags[i].hausdorff_to_reference)
            os << ", \"hausdorff_to_reference\": " << format_double(*diags[i].hausdorff_to_reference);
        os << ", \"diagram_size\": " << diags[i].diagram_size << "}";
    }
    os << "]";
    return os.str();
}

std::string estimator_report_json(const char* command, const tda::EstimatorReport& report,
                                  const tda::PipelineParams& params, double t_max) {
    std::ostringstream os;
    os << "{\n  \"command\": \"" << command << "\",\n";
    os << "  \"m\": " << report.scheme.m << ",\n  \"n\": " << report.scheme.n << ",\n";
    os << "  \"seed\": " << report.scheme.seed << ",\n";
    os << "  \"replacement\": " << json_bool(report.scheme.replacement) << ",\n";
    os << "  \"dim\": " << params.landscape_dim << ",\n  \"depth\": " << params.depth << ",\n";
    os << "  \"grid\": " << params.grid << ",\n  \"t_max\": " << format_double(t_max) << ",\n";
    if (report.selected_index != std::numeric_limits<std::size_t>::max())
        os << "  \"selected_index\": " << report.selected_index << ",\n";
    os << "  \"diagnostics\": " << diagnostics_json(report.diagnostics) << "\n}\n";
    return os.str();
}

void write_band_csv(const std::string& path, const tda::ConfidenceBand& band) {
    std::ostringstream os;
    const tda::Landscape& c = band.center;
    os << "t";
    for (std::size_t k = 1; k <= c.depth; ++k)
        os << ",lower" << k << ",center" << k << ",upper" << k;
    os << "\n";
    for (std::size_t g = 0; g < c.grid; ++g) {
        os << format_double(static_cast<double>(g) * c.dt());
        for (std::size_t k = 0; k < c.depth; ++k) {
            const double v = c.at(k, g);
            os << "," << format_double(v - band.half_width) << "," << format_double(v) << ","
               << format_double(v + band.half_width);
        }
        os << "\n";
    }
    write_text(path, os.str());
}

// ---- commands ------------------------------------------------------------------

struct GenCmd {
    std::string shape = "circle";
    std::size_t count = 500;
    std::uint64_t seed = 0;
    tda::SyntheticShape spec;
    std::string out;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("gen", "Sample a synthetic shape to a point CSV");
        cmd->add_option("--shape", shape, "circle|sphere|torus|cube")
            ->check(CLI::IsMember({"circle", "sphere", "torus", "cube"}))
            ->capture_default_str();
        cmd->add_option("--count", count, "Number of points")->capture_default_str();
        cmd->add_option("--seed", seed, "Sampling seed")->capture_default_str();
        cmd->add_option("--radius", spec.radius, "Circle/sphere radius")->capture_default_str();
        cmd->add_option("--ring-radius", spec.ring_radius, "Torus ring radius")->capture_default_str();
        cmd->add_option("--tube-radius", spec.tube_radius, "Torus tube radius")->capture_default_str();
        cmd->add_option("--side", spec.side, "Cube side length")->capture_default_str();
        cmd->add_option("--noise", spec.noise_sigma, "Gaussian noise sigma")->capture_default_str();
        cmd->add_option("--out", out, "Output CSV path")->required();
        cmd->callback([this] { run(); });
    }

    void run() {
        log_kv("shape", shape);
        log_kv("count", std::to_string(count));
        log_kv("seed", std::to_string(seed));
        spec.kind = tda::shape_kind_from_name(shape);
        const tda::PointCloud cloud = tda::sample_shape(spec, count, seed);
        tda::write_point_csv(out, cloud);
        std::cerr << "gen: wrote " << cloud.size() << " points to " << out << "\n";
    }
};

struct DiagramCmd {
    InputOpts input;
    PipelineOpts pipe;
    FilterOpts filter;
    std::string out;
    std::string dump_filtration;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("diagram", "Persistence diagram of one cloud");
        input.add(cmd);
        pipe.add(cmd);
        filter.add(cmd);
        cmd->add_option("--out", out, "Output diagram JSON")->required();
        cmd->add_option("--dump-filtration", dump_filtration, "Also dump the filtration as text");
        cmd->callback([this] { run(); });
    }

    void run() {
        pipe.echo();
        const tda::PointCloud cloud = filter.apply(input.load());
        const tda::PipelineParams params = pipe.params();
        const double t_max = tda::resolve_t_max(cloud, params);
        const tda::Filtration filtration = tda::build_rips(cloud, params.rips);
        if (!dump_filtration.empty()) filtration.dump(dump_filtration);
        const tda::PersistenceDiagram diagram = tda::compute_diagram(filtration, t_max);
        tda::write_diagram_json(out, diagram);
        std::cerr << "diagram: " << cloud.size() << " points, threshold "
                  << format_double(filtration.threshold()) << ", " << diagram.points.size()
                  << " points across dims 0.." << params.rips.max_dim << " -> " << out << "\n";
    }
};

struct EstimateCmd {
    bool closest = false;
    InputOpts input;
    PipelineOpts pipe;
    SamplingOpts sampling;
    FilterOpts filter;
    std::string out;
    std::string report_out;
    std::string band_out;
    double alpha = 0.05;
    std::size_t resamples = 1000;
    std::uint64_t band_seed = 1;

    void add(CLI::App& app, bool closest_mode) {
        closest = closest_mode;
        auto* cmd = app.add_subcommand(closest ? "closest" : "average",
                                       closest ? "Landscape of the subsample closest to the cloud"
                                               : "Average landscape over subsamples");
        input.add(cmd);
        pipe.add(cmd);
        sampling.add(cmd, 100, 30);
        filter.add(cmd);
        cmd->add_option("--out", out, "Output landscape CSV")->required();
        cmd->add_option("--report-out", report_out, "Output report JSON");
        if (!closest) {
            cmd->add_option("--band-out", band_out, "Bootstrap band CSV");
            cmd->add_option("--alpha", alpha, "Band miscoverage level")->capture_default_str();
            cmd->add_option("--resamples", resamples, "Bootstrap resamples B")->capture_default_str();
            cmd->add_option("--band-seed", band_seed, "Bootstrap seed")->capture_default_str();
        }
        cmd->callback([this] { run(); });
    }

    void run() {
        pipe.echo();
        sampling.echo();
        const tda::PointCloud cloud = filter.apply(input.load());
        const tda::PipelineParams params = pipe.params();
        const double t_max = tda::resolve_t_max(cloud, params);
        const tda::SubsampleScheme scheme = sampling.scheme();
        const tda::EstimatorReport report = closest ? tda::closest_sample_landscape(cloud, scheme, params)
                                                    : tda::average_landscape(cloud, scheme, params);
        tda::write_landscape_csv(out, report.estimate);
        if (!report_out.empty())
            write_text(report_out,
                       estimator_report_json(closest ? "closest" : "average", report, params, t_max));
        if (!band_out.empty()) {
            const tda::ConfidenceBand band =
                tda::bootstrap_band_subsampled(cloud, scheme, params, alpha, resamples, band_seed);
            write_band_csv(band_out, band);
            std::cerr << "band: half-width " << format_double(band.half_width) << " at alpha "
                      << format_double(alpha) << " (" << resamples << " resamples) -> " << band_out << "\n";
        }
        std::cerr << (closest ? "closest" : "average") << ": sup " << format_double(report.estimate.sup());
        if (closest) std::cerr << ", selected subsample " << report.selected_index;
        std::cerr << ", " << format_double(report.wall_seconds) << "s -> " << out << "\n";
    }
};

struct DissimilarityCmd {
    std::vector<std::string> inputs;
    std::vector<std::string> labels;
    PipelineOpts pipe;
    SamplingOpts sampling;
    std::string out;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("dissimilarity",
                                       "Pairwise sup-norm distances between average landscapes");
        cmd->add_option("--in", inputs, "Input point CSVs (repeat)")->required()->expected(-2);
        cmd->add_option("--labels", labels, "Row labels (default: file stems)")->delimiter(',');
        pipe.add(cmd);
        sampling.add(cmd, 300, 100);
        cmd->add_option("--out", out, "Output matrix CSV")->required();
        cmd->callback([this] { run(); });
    }

    static std::string stem(const std::string& path) {
        const std::size_t slash = path.find_last_of("/\\");
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        const std::size_t dot = base.find_last_of('.');
        return dot == std::string::npos ? base : base.substr(0, dot);
    }

    void run() {
        pipe.echo();
        sampling.echo();
        std::vector<tda::PointCloud> clouds;
        clouds.reserve(inputs.size());
        for (const std::string& path : inputs) {
            log_kv("in", path);
            clouds.push_back(tda::read_point_csv(path));
        }
        if (labels.empty())
            for (const std::string& path : inputs) labels.push_back(stem(path));
        const tda::DissimilarityResult result =
            tda::dissimilarity_matrix(clouds, labels, sampling.scheme(), pipe.params());
        tda::write_dissimilarity_csv(out, result);
        std::cerr << "dissimilarity: " << clouds.size() << " clouds -> " << out << "\n";
    }
};

// ---- verify subcommands ---------------------------------------------------------

struct VerifyWassersteinCmd {
    std::string mu_path, nu_path;
    std::size_t m = 100;
    double p = 1.0;
    std::size_t trials = 2000;
    std::uint64_t seed = 0;
    std::size_t support_cap = 2048;
    PipelineOpts pipe;
    std::string out;
    int* exit_code = nullptr;

    void add(CLI::App& verify, int* code) {
        exit_code = code;
        auto* cmd = verify.add_subcommand(
            "stability-wasserstein", "Monte-Carlo check of the expected-landscape transport bound");
        cmd->add_option("--mu", mu_path, "Point CSV of the first measure's support")->required();
        cmd->add_option("--nu", nu_path, "Point CSV of the second measure's support")->required();
        cmd->add_option("--m", m, "Sample size per draw")->capture_default_str();
        cmd->add_option("--p", p, "Wasserstein order")->capture_default_str();
        cmd->add_option("--trials", trials, "Monte-Carlo trials per side")->capture_default_str();
        cmd->add_option("--seed", seed, "Monte-Carlo seed")->capture_default_str();
        cmd->add_option("--support-cap", support_cap, "Exact-transport support cap")->capture_default_str();
        pipe.add(cmd);
        cmd->add_option("--out", out, "Output report JSON");
        cmd->callback([this] { run(); });
    }

    void run() {
        pipe.echo();
        log_kv("m", std::to_string(m));
        log_kv("p", format_double(p));
        log_kv("trials", std::to_string(trials));
        log_kv("seed", std::to_string(seed));
        const tda::DiscreteMeasure mu = tda::uniform_measure(tda::read_point_csv(mu_path));
        const tda::DiscreteMeasure nu = tda::uniform_measure(tda::read_point_csv(nu_path));
        tda::TransportParams tp;
        tp.support_cap = support_cap;
        const tda::StabilityReport report =
            tda::verify_stability_wasserstein(mu, nu, m, p, trials, seed, pipe.params(), tp);
        std::ostringstream os;
        os << "{\n  \"command\": \"verify-stability-wasserstein\",\n";
        os << "  \"m\": " << report.m << ",\n  \"p\": " << format_double(report.p) << ",\n";
        os << "  \"trials\": " << report.trials << ",\n  \"seed\": " << seed << ",\n";
        os << "  \"w_distance\": " << format_double(report.w_distance) << ",\n";
        os << "  \"lhs\": " << format_double(report.lhs) << ",\n";
        os << "  \"rhs\": " << format_double(report.rhs) << ",\n";
        os << "  \"mc_stderr\": " << format_double(report.mc_stderr) << ",\n";
        os << "  \"grid_error\": " << format_double(report.grid_error) << ",\n";
        os << "  \"margin\": " << format_double(report.margin) << ",\n";
        os << "  \"violated\": " << json_bool(report.violated) << "\n}\n";
        if (!out.empty()) write_text(out, os.str());
        std::cerr << "stability-wasserstein: lhs " << format_double(report.lhs) << " vs rhs "
                  << format_double(report.rhs) << " (+3se+grid), violated=" << json_bool(report.violated)
                  << "\n";
        if (report.violated) *exit_code = 1;
    }
};

struct VerifyHausdorffCmd {
    std::string x_path, y_path;
    PipelineOpts pipe;
    double tol = 1e-9;
    std::string out;
    int* exit_code = nullptr;

    void add(CLI::App& verify, int* code) {
        exit_code = code;
        auto* cmd = verify.add_subcommand("stability-hausdorff",
                                          "Check bottleneck <= Hausdorff and landscape <= bottleneck");
        cmd->add_option("--x", x_path, "First point CSV")->required();
        cmd->add_option("--y", y_path, "Second point CSV")->required();
        pipe.add(cmd);
        cmd->add_option("--tol", tol, "Comparison slack")->capture_default_str();
        cmd->add_option("--out", out, "Output report JSON");
        cmd->callback([this] { run(); });
    }

    void run() {
        pipe.echo();
        const tda::PointCloud x = tda::read_point_csv(x_path);
        const tda::PointCloud y = tda::read_point_csv(y_path);
        const tda::PipelineParams params = pipe.params();
        double t_max = params.t_max;
        if (t_max <= 0.0) t_max = 2.0 * std::max(x.diameter(), y.diameter());
        tda::require(t_max > 0.0, "validation", "cannot resolve grid endpoint");
        const double h = tda::hausdorff(x, y);
        const tda::PersistenceDiagram dx = tda::compute_diagram(tda::build_rips(x, params.rips), t_max);
        const tda::PersistenceDiagram dy = tda::compute_diagram(tda::build_rips(y, params.rips), t_max);
        const double grid_error = t_max / static_cast<double>(params.grid - 1);
        bool violated = false;
        std::ostringstream dims;
        dims << "[";
        for (int d = 0; d <= params.rips.max_dim; ++d) {
            const double b = tda::bottleneck(dx, dy, d);
            const tda::Landscape lx = tda::build_landscape(dx, d, params.depth, params.grid);
            const tda::Landscape ly = tda::build_landscape(dy, d, params.depth, params.grid);
            const double li = tda::linf_distance(lx, ly);
            const bool ok = b <= h + tol && li <= b + grid_error + tol;
            if (!ok) violated = true;
            if (d) dims << ",";
            dims << "{\"dim\": " << d << ", \"bottleneck\": " << format_double(b)
                 << ", \"landscape_linf\": " << format_double(li) << ", \"chain_ok\": " << json_bool(ok)
                 << "}";
            std::cerr << "stability-hausdorff dim " << d << ": linf " << format_double(li)
                      << " <= bottleneck " << format_double(b) << " (+grid) <= hausdorff "
                      << format_double(h) << " : " << (ok ? "ok" : "VIOLATED") << "\n";
        }
        dims << "]";
        std::ostringstream os;
        os << "{\n  \"command\": \"verify-stability-hausdorff\",\n";
        os << "  \"hausdorff\": " << format_double(h) << ",\n";
        os << "  \"t_max\": " << format_double(t_max) << ",\n";
        os << "  \"grid_error\": " << format_double(grid_error) << ",\n";
        os << "  \"tol\": " << format_double(tol) << ",\n";
        os << "  \"dims\": " << dims.str() << ",\n";
        os << "  \"violated\": " << json_bool(violated) << "\n}\n";
        if (!out.empty()) write_text(out, os.str());
        if (violated) *exit_code = 1;
    }
};

struct VerifyRiskCurvesCmd {
    InputOpts input;
    PipelineOpts pipe;
    tda::RiskCurveParams rc;
    std::string out;
    std::string curves_out;
    int* exit_code = nullptr;

    void add(CLI::App& verify, int* code) {
        exit_code = code;
        auto* cmd = verify.add_subcommand("risk-curves", "Bias and variance proxies vs m and n");
        input.add(cmd);
        pipe.add(cmd);
        cmd->add_option("--m-list", rc.m_values, "Bias-curve subsample sizes")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--n-list", rc.n_values, "Variance-curve subsample counts")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--m-fixed", rc.m_fixed, "Subsample size for the variance curve")
            ->capture_default_str();
        cmd->add_option("--bias-draws", rc.bias_draws, "Monte-Carlo draws per bias point")
            ->capture_default_str();
        cmd->add_option("--replications", rc.replications, "Replications per variance point")
            ->capture_default_str();
        cmd->add_option("--reference-n", rc.reference_n, "Subsamples in the reference average")
            ->capture_default_str();
        cmd->add_option("--seed", rc.seed, "Seed")->capture_default_str();
        cmd->add_option("--out", out, "Output report JSON");
        cmd->add_option("--curves-out", curves_out, "Output curves CSV");
        cmd->callback([this] { run(); });
    }

    void run() {
        pipe.echo();
        log_kv("seed", std::to_string(rc.seed));
        const tda::PointCloud cloud = input.load();
        const tda::RiskCurves curves = tda::risk_curves(cloud, rc, pipe.params());
        auto join_sizes = [](const std::vector<std::size_t>& v) {
            std::ostringstream os;
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
            return os.str();
        };
        auto join_doubles = [](const std::vector<double>& v) {
            std::ostringstream os;
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v[i]);
            return os.str();
        };
        const bool violated = !(curves.bias_monotone && curves.variance_monotone);
        std::ostringstream os;
        os << "{\n  \"command\": \"verify-risk-curves\",\n";
        os << "  \"m_values\": [" << join_sizes(curves.m_values) << "],\n";
        os << "  \"bias\": [" << join_doubles(curves.bias) << "],\n";
        os << "  \"n_values\": [" << join_sizes(curves.n_values) << "],\n";
        os << "  \"variance\": [" << join_doubles(curves.variance) << "],\n";
        os << "  \"bias_monotone\": " << json_bool(curves.bias_monotone) << ",\n";
        os << "  \"variance_monotone\": " << json_bool(curves.variance_monotone) << ",\n";
        os << "  \"violated\": " << json_bool(violated) << "\n}\n";
        if (!out.empty()) write_text(out, os.str());
        if (!curves_out.empty()) {
            std::ostringstream cs;
            cs << "curve,param,value\n";
            for (std::size_t i = 0; i < curves.m_values.size(); ++i)
                cs << "bias," << curves.m_values[i] << "," << format_double(curves.bias[i]) << "\n";
            for (std::size_t i = 0; i < curves.n_values.size(); ++i)
                cs << "variance," << curves.n_values[i] << "," << format_double(curves.variance[i]) << "\n";
            write_text(curves_out, cs.str());
        }
        std::cerr << "risk-curves: bias decreasing=" << json_bool(curves.bias_monotone)
                  << ", variance decreasing=" << json_bool(curves.variance_monotone) << "\n";
        if (violated) *exit_code = 1;
    }
};

struct VerifyOutlierCmd {
    tda::OutlierParams params;
    std::size_t seeds = 20;
    std::string out;
    int* exit_code = nullptr;

    void add(CLI::App& verify, int* code) {
        exit_code = code;
        auto* cmd = verify.add_subcommand("outlier", "Planted-outlier robustness experiment");
        cmd->add_option("--seeds", seeds, "Number of independent runs")->capture_default_str();
        cmd->add_option("--n-points", params.n_points, "Circle sample size N")->capture_default_str();
        cmd->add_option("--m", params.m, "Points per subsample")->capture_default_str();
        cmd->add_option("--n", params.n, "Subsamples per estimator")->capture_default_str();
        cmd->add_option("--threshold", params.threshold, "Fixed Rips threshold for full runs")
            ->capture_default_str();
        cmd->add_option("--t-max", params.t_max, "Landscape grid endpoint")->capture_default_str();
        cmd->add_option("--grid", params.grid, "Landscape grid columns")->capture_default_str();
        cmd->add_option("--seed", params.seed, "Base seed")->capture_default_str();
        cmd->add_option("--threads", params.threads, "Worker thread cap")->capture_default_str();
        cmd->add_option("--out", out, "Output report JSON");
        cmd->callback([this] { run(); });
    }

    void run() {
        log_kv("seeds", std::to_string(seeds));
        log_kv("n-points", std::to_string(params.n_points));
        log_kv("m", std::to_string(params.m));
        log_kv("n", std::to_string(params.n));
        log_kv("seed", std::to_string(params.seed));
        std::size_t violations = 0, beats = 0, avg_below_full = 0;
        std::ostringstream rows;
        rows << "[";
        for (std::size_t s = 0; s < seeds; ++s) {
            tda::OutlierParams run_params = params;
            run_params.seed = tda::Rng::stream(params.seed, s).next_u64();
            const tda::OutlierReport r = tda::outlier_experiment(run_params);
            tda::require(r.guard_ok, "validation",
                         "fixed-threshold guard failed: max dim-1 death " +
                             format_double(r.max_dim1_death) + " too close to threshold " +
                             format_double(params.threshold));
            if (r.violated) ++violations;
            if (r.avg_beats_closest) ++beats;
            if (r.gap_avg < r.gap_full) ++avg_below_full;
            if (s) rows << ",";
            rows << "\n    {\"seed\": " << s << ", \"gap_full\": " << format_double(r.gap_full)
                 << ", \"gap_avg\": " << format_double(r.gap_avg)
                 << ", \"gap_closest\": " << format_double(r.gap_closest)
                 << ", \"cap\": " << format_double(r.cap)
                 << ", \"avg_stderr\": " << format_double(r.avg_stderr)
                 << ", \"grid_error\": " << format_double(r.grid_error)
                 << ", \"violated\": " << json_bool(r.violated)
                 << ", \"full_to_clean\": " << format_double(r.full_to_clean)
                 << ", \"avg_to_clean\": " << format_double(r.avg_to_clean)
                 << ", \"closest_to_clean\": " << format_double(r.closest_to_clean)
                 << ", \"avg_beats_closest\": " << json_bool(r.avg_beats_closest)
                 << ", \"closest_infected\": " << json_bool(r.closest_infected)
                 << ", \"max_dim1_death\": " << format_double(r.max_dim1_death) << "}";
            std::cerr << "outlier seed " << s << ": gap_avg " << format_double(r.gap_avg) << " vs cap "
                      << format_double(r.cap) << ", gap_full " << format_double(r.gap_full)
                      << ", avg_beats_closest=" << json_bool(r.avg_beats_closest) << "\n";
        }
        rows << "\n  ]";
        const bool majority = 2 * beats > seeds;
        const bool violated = violations > 0;
        std::ostringstream os;
        os << "{\n  \"command\": \"verify-outlier\",\n";
        os << "  \"seeds\": " << seeds << ",\n";
        os << "  \"violations\": " << violations << ",\n";
        os << "  \"avg_below_full_count\": " << avg_below_full << ",\n";
        os << "  \"avg_beats_closest_votes\": " << beats << ",\n";
        os << "  \"majority_avg_beats_closest\": " << json_bool(majority) << ",\n";
        os << "  \"runs\": " << rows.str() << ",\n";
        os << "  \"violated\": " << json_bool(violated) << "\n}\n";
        if (!out.empty()) write_text(out, os.str());
        std::cerr << "outlier: " << violations << "/" << seeds << " bound violations, "
                  << avg_below_full << "/" << seeds << " seeds with avg gap below full gap, " << beats
                  << "/" << seeds << " votes for average over closest\n";
        if (violated) *exit_code = 1;
    }
};

struct VerifyBoundsCmd {
    double a = 1.0, b = 1.0, r0 = 0.0, c1 = 1.0, c2 = 1.0;
    std::size_t m = 100, n = 30;
    double hausdorff_distance = -1.0;
    double k_const = 0.0, v_const = 0.0, a_prime = 0.0;
    std::size_t n_points = 0;
    std::string out;
    int* exit_code = nullptr;

    void add(CLI::App& verify, int* code) {
        exit_code = code;
        auto* cmd = verify.add_subcommand("bounds", "Evaluate the closed-form risk/stability bounds");
        cmd->add_option("--a", a, "Standard-assumption a")->capture_default_str();
        cmd->add_option("--b", b, "Standard-assumption b")->capture_default_str();
        cmd->add_option("--r0", r0, "Standard-assumption r0")->capture_default_str();
        cmd->add_option("--c1", c1, "Average-bound constant")->capture_default_str();
        cmd->add_option("--c2", c2, "Closest-bound constant")->capture_default_str();
        cmd->add_option("--m", m, "Subsample size")->capture_default_str();
        cmd->add_option("--n", n, "Number of subsamples")->capture_default_str();
        cmd->add_option("--hausdorff", hausdorff_distance, "Hausdorff distance for the stability form");
        cmd->add_option("--k", k_const, "Discrete-r0 constant K");
        cmd->add_option("--v", v_const, "Discrete-r0 constant v");
        cmd->add_option("--a-prime", a_prime, "Discrete-r0 constant a'");
        cmd->add_option("--n-points", n_points, "Discrete-r0 sample size N");
        cmd->add_option("--out", out, "Output report JSON");
        cmd->callback([this] { run(); });
    }

    void run() {
        const tda::StandardAssumption assumption{a, b, r0};
        const double rm = tda::bound_rm(a, b, m);
        const double avg_bound = tda::bound_average_bias(assumption, m, c1);
        const double close_bound = tda::bound_closest(assumption, m, n, c2);
        std::ostringstream os;
        os << "{\n  \"command\": \"verify-bounds\",\n";
        os << "  \"a\": " << format_double(a) << ",\n  \"b\": " << format_double(b) << ",\n";
        os << "  \"r0\": " << format_double(r0) << ",\n  \"m\": " << m << ",\n  \"n\": " << n << ",\n";
        os << "  \"r_m\": " << format_double(rm) << ",\n";
        os << "  \"average_bias_bound\": " << format_double(avg_bound) << ",\n";
        os << "  \"closest_bound\": " << format_double(close_bound);
        std::cerr << "bounds: r_m " << format_double(rm) << ", average " << format_double(avg_bound)
                  << ", closest " << format_double(close_bound) << "\n";
        if (hausdorff_distance >= 0.0) {
            const double stab = tda::bound_stability_hausdorff(assumption, m, hausdorff_distance, c1);
            os << ",\n  \"stability_bound\": " << format_double(stab);
            std::cerr << "bounds: stability " << format_double(stab) << "\n";
        }
        if (n_points > 0) {
            const double r0d = tda::compute_r0_discrete(k_const, v_const, a_prime, b, n_points);
            os << ",\n  \"r0_discrete\": " << format_double(r0d);
            std::cerr << "bounds: r0_discrete " << format_double(r0d) << "\n";
        }
        os << "\n}\n";
        if (!out.empty()) write_text(out, os.str());
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persistent-homology subsampling pipelines"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "Config file: key=value lines, [subcommand] sections");
    app.require_subcommand(0, 1);
    std::string kernels = "auto";
    app.add_option("--kernels", kernels, "Kernel backend: auto|scalar|avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
        ->capture_default_str();

    int exit_code = 0;
    GenCmd gen;
    DiagramCmd diagram;
    EstimateCmd avg_cmd, closest_cmd;
    DissimilarityCmd dissimilarity;
    gen.add(app);
    diagram.add(app);
    avg_cmd.add(app, false);
    closest_cmd.add(app, true);
    dissimilarity.add(app);

    auto* verify = app.add_subcommand("verify", "Numerical checks of the stability and risk bounds");
    verify->require_subcommand(1);
    VerifyWassersteinCmd vw;
    VerifyHausdorffCmd vh;
    VerifyRiskCurvesCmd vr;
    VerifyOutlierCmd vo;
    VerifyBoundsCmd vb;
    vw.add(*verify, &exit_code);
    vh.add(*verify, &exit_code);
    vr.add(*verify, &exit_code);
    vo.add(*verify, &exit_code);
    vb.add(*verify, &exit_code);

    // Resolve the kernel backend before any subcommand callback runs.
    app.parse_complete_callback([&kernels] {
        tda::kernels::force_backend(kernels);
        std::cerr << "config: kernels=" << tda::kernels::active_name() << "\n";
    });

    try {
        app.parse(argc, argv);
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 2;
        }
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const tda::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_budget() ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}

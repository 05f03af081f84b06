#include "segmenter/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "segmenter/dataset.hpp"
#include "segmenter/evalgen.hpp"
#include "segmenter/pipeline.hpp"
#include "segmenter/rng.hpp"
#include "segmenter/svg.hpp"
#include "segmenter/textio.hpp"

namespace segmenter {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Stream ids for per-stage sub-seeds derived from the single --seed flag.
constexpr uint64_t kTsneStream = 1, kForestStream = 2, kFoldStream = 3;

struct CliOptions {
    std::string input;
    std::string out_dir;
    uint64_t seed = 1;
    double perplexity = 30.0;
    int iters = 1000;
    double early_exag = 12.0;
    double late_exag = 1.0;
    int late_exag_start = 800;
    double learning_rate = 200.0;
    double eps_constant = 0.1;
    std::vector<double> eps_grid;
    int min_pts = 4;
    int min_clusters = 2;
    int trees = 100;
    std::string max_features = "sqrt";
    int folds = 5;
    bool no_standardize = false;
};

std::vector<double> default_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 15; ++i) g.push_back(0.02 * i);
    return g;
}

PipelineConfig build_config(const CliOptions& o) {
    PipelineConfig cfg;
    cfg.tsne.perplexity = o.perplexity;
    cfg.tsne.n_iterations = o.iters;
    cfg.tsne.early_exaggeration_factor = o.early_exag;
    cfg.tsne.late_exaggeration_factor = o.late_exag;
    cfg.tsne.late_exaggeration_start = o.late_exag_start;
    // With late exaggeration off its start iteration is inert; keep short
    // --iters runs valid without demanding an explicit start.
    if (o.late_exag == 1.0 && o.late_exag_start > o.iters)
        cfg.tsne.late_exaggeration_start = o.iters;
    // There is no flag for the early exaggeration window, so shrink it when a
    // short run leaves it no room instead of failing.
    if (cfg.tsne.early_exaggeration_iters >= cfg.tsne.late_exaggeration_start) {
        cfg.tsne.early_exaggeration_iters =
            std::max(0, std::min(o.iters / 2, cfg.tsne.late_exaggeration_start - 1));
        std::cerr << "note: early exaggeration window shortened to "
                  << cfg.tsne.early_exaggeration_iters << " iterations\n";
    }
    cfg.tsne.learning_rate = o.learning_rate;
    cfg.tsne.seed = derive_seed(o.seed, kTsneStream);
    cfg.dbscan.epsilon_constant = o.eps_constant;
    cfg.dbscan.min_pts = o.min_pts;
    cfg.forest.n_trees = o.trees;
    cfg.forest.max_features = MaxFeatures::parse(o.max_features);
    cfg.forest.seed = derive_seed(o.seed, kForestStream);
    cfg.standardize_input = !o.no_standardize;
    return cfg;
}

// A file whose first line is entirely numeric has no header row.
bool detect_header(const fs::path& path) {
    std::string text = read_file(path);
    size_t nl = text.find('\n');
    std::string first = nl == std::string::npos ? text : text.substr(0, nl);
    if (first.empty()) return false;
    size_t start = 0;
    while (start <= first.size()) {
        size_t comma = first.find(',', start);
        std::string cell = comma == std::string::npos ? first.substr(start)
                                                      : first.substr(start, comma - start);
        double v;
        if (!parse_double(cell, v)) return true;
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return false;
}

json tsne_to_json(const TsneConfig& c) {
    return json{{"perplexity", c.perplexity},
                {"n_iterations", c.n_iterations},
                {"early_exaggeration_factor", c.early_exaggeration_factor},
                {"early_exaggeration_iters", c.early_exaggeration_iters},
                {"late_exaggeration_factor", c.late_exaggeration_factor},
                {"late_exaggeration_start", c.late_exaggeration_start},
                {"learning_rate", c.learning_rate},
                {"momentum_initial", c.momentum_initial},
                {"momentum_final", c.momentum_final},
                {"momentum_switch_iter", c.momentum_switch_iter},
                {"seed", c.seed}};
}

json run_config_json(const std::string& command, const CliOptions& o, const PipelineConfig& cfg) {
    json j;
    j["command"] = command;
    j["input"] = o.input;
    j["output_dir"] = o.out_dir;
    j["seed"] = o.seed;
    j["standardize_input"] = cfg.standardize_input;
    j["tsne"] = tsne_to_json(cfg.tsne);
    j["dbscan"] = json{{"epsilon_constant", cfg.dbscan.epsilon_constant},
                       {"min_pts", cfg.dbscan.min_pts},
                       {"noise_as_single_cluster", cfg.dbscan.noise_as_single_cluster}};
    j["forest"] = json{{"n_trees", cfg.forest.n_trees},
                       {"max_features", cfg.forest.max_features.str()},
                       {"min_samples_leaf", cfg.forest.min_samples_leaf},
                       {"max_depth", cfg.forest.max_depth},
                       {"bootstrap", cfg.forest.bootstrap},
                       {"seed", cfg.forest.seed}};
    return j;
}

json metrics_to_json(const Metrics& m) {
    return json{{"accuracy", m.accuracy},
                {"precision_weighted", m.precision_weighted},
                {"recall_weighted", m.recall_weighted},
                {"f1_weighted", m.f1_weighted}};
}

std::string profiles_csv(const ClusterProfileSet& p,
                         const Scaler* original_units) {
    std::string out = "cluster,feature,count,mean,min,q1,median,q3,max\n";
    for (const ClusterProfile& c : p.clusters) {
        for (size_t f = 0; f < p.feature_names.size(); ++f) {
            const FeatureSummary& s = c.features[f];
            auto val = [&](double v) {
                return original_units ? original_units->invert(static_cast<int>(f), v) : v;
            };
            out += std::to_string(c.label) + "," + p.feature_names[f] + "," +
                   std::to_string(s.count) + "," + format_double(val(c.mean[f])) + "," +
                   format_double(val(s.min)) + "," + format_double(val(s.q1)) + "," +
                   format_double(val(s.median)) + "," + format_double(val(s.q3)) + "," +
                   format_double(val(s.max)) + "\n";
        }
    }
    return out;
}

void write_segment_outputs(const fs::path& dir, const Dataset& d, const SegmentationResult& r,
                           const std::optional<Scaler>& scaler, const json& run_cfg) {
    fs::create_directories(dir);

    std::string emb = "row_id,x,y\n";
    for (int i = 0; i < r.embedding.coords.rows; ++i)
        emb += d.row_ids[i] + "," + format_double(r.embedding.coords(i, 0)) + "," +
               format_double(r.embedding.coords(i, 1)) + "\n";
    write_file_atomic(dir / "embedding.csv", emb);

    std::string labels = "row_id,cluster\n";
    for (size_t i = 0; i < r.assignment.labels.size(); ++i)
        labels += d.row_ids[i] + "," + std::to_string(r.assignment.labels[i]) + "\n";
    write_file_atomic(dir / "labels.csv", labels);

    write_file_atomic(dir / "profiles.csv", profiles_csv(r.profiles, nullptr));
    if (scaler)
        write_file_atomic(dir / "profiles_original.csv", profiles_csv(r.profiles, &*scaler));

    std::string imp = "feature,importance\n";
    for (const auto& [name, value] : feature_importances(r.model))
        imp += name + "," + format_double(value) + "\n";
    write_file_atomic(dir / "importances.csv", imp);

    save_model(r.model, dir / "model.json");
    write_file_atomic(dir / "embedding.svg", embedding_scatter_svg(r.embedding, r.assignment));

    json run = run_cfg;
    run["epsilon_used"] = r.assignment.epsilon_used;
    run["final_kl"] = r.embedding.final_kl;
    run["n_points"] = d.n_points();
    run["n_clusters"] = r.assignment.n_clusters();
    write_file_atomic(dir / "run.json", run.dump(2) + "\n");
}

int cmd_segment(const CliOptions& o) {
    Dataset d = load_csv(o.input, detect_header(o.input));
    PipelineConfig cfg = build_config(o);
    SegmentationResult r = segment(d, cfg);

    std::optional<Scaler> scaler;
    if (cfg.standardize_input) scaler = Scaler::fit(d);
    write_segment_outputs(o.out_dir, d, r, scaler, run_config_json("segment", o, cfg));

    std::cout << d.n_points() << " points -> " << r.assignment.n_clusters() << " clusters ("
              << r.assignment.nonsingleton_count() << " non-singleton), epsilon "
              << format_double(r.assignment.epsilon_used) << "\n";
    auto ranked = feature_importances(r.model);
    std::cout << "top features:";
    for (size_t i = 0; i < ranked.size() && i < 4; ++i)
        std::cout << " " << ranked[i].first << "=" << format_double(ranked[i].second);
    std::cout << "\n";
    return 0;
}

int cmd_tune(const CliOptions& o) {
    Dataset d = load_csv(o.input, detect_header(o.input));
    PipelineConfig cfg = build_config(o);
    std::vector<double> grid = o.eps_grid.empty() ? default_grid() : o.eps_grid;

    TuningReport rep = tune_epsilon_detailed(d, grid, cfg, o.min_clusters);

    fs::create_directories(o.out_dir);
    json j;
    j["run"] = run_config_json("tune", o, cfg);
    j["min_clusters"] = o.min_clusters;
    j["chosen"] = rep.chosen;
    json cands = json::array();
    for (const EpsilonCandidate& c : rep.candidates)
        cands.push_back(json{{"constant", c.constant},
                             {"mean_f1", c.mean_f1},
                             {"nonsingleton_clusters", c.nonsingleton_clusters},
                             {"accepted", c.accepted}});
    j["candidates"] = std::move(cands);
    write_file_atomic(fs::path(o.out_dir) / "tuning.json", j.dump(2) + "\n");

    std::cout << "chosen epsilon constant: " << format_double(rep.chosen) << "\n";
    return 0;
}

int cmd_generalize(const CliOptions& o) {
    Dataset d = load_csv(o.input, detect_header(o.input));
    PipelineConfig cfg = build_config(o);
    std::vector<double> grid = o.eps_grid.empty() ? default_grid() : o.eps_grid;
    bool fixed = grid.size() == 1;

    // The ground truth is one segmentation of the whole set, so its constant
    // must be settled up front: taken verbatim when fixed, tuned on the full
    // dataset otherwise.
    if (fixed) {
        cfg.dbscan.epsilon_constant = grid[0];
    } else {
        cfg.dbscan.epsilon_constant = tune_epsilon(d, grid, cfg, o.min_clusters);
    }

    GeneralizationReport rep =
        generalization_run(d, cfg, o.folds, grid, o.min_clusters, derive_seed(o.seed, kFoldStream));

    fs::create_directories(o.out_dir);
    json j;
    j["run"] = run_config_json("generalize", o, cfg);
    j["folds"] = o.folds;
    j["min_clusters"] = o.min_clusters;
    j["grid"] = grid;
    j["fixed_epsilon"] = fixed;
    j["ground_truth"] = json{{"epsilon_constant", cfg.dbscan.epsilon_constant},
                             {"epsilon_used", rep.ground_truth_epsilon},
                             {"clusters", rep.full_cluster_count},
                             {"nonsingleton_clusters", rep.full_nonsingleton_count}};
    json folds = json::array();
    for (const FoldOutcome& f : rep.per_fold)
        folds.push_back(json{{"fold", f.fold_index},
                             {"metrics", metrics_to_json(f.metrics)},
                             {"matching", f.matching.best_perm},
                             {"epsilon_constant", f.epsilon_constant},
                             {"tuned", f.tuned},
                             {"train_clusters", f.train_cluster_count},
                             {"train_nonsingleton_clusters", f.train_nonsingleton_count}});
    j["per_fold"] = std::move(folds);
    j["mean_weighted"] = metrics_to_json(rep.mean_weighted);
    write_file_atomic(fs::path(o.out_dir) / "report.json", j.dump(2) + "\n");

    char row[256];
    std::snprintf(row, sizeof(row), "%-12s %8.3f %10.3f %8.3f %9.3f",
                  fs::path(o.input).stem().string().c_str(), rep.mean_weighted.accuracy,
                  rep.mean_weighted.precision_weighted, rep.mean_weighted.recall_weighted,
                  rep.mean_weighted.f1_weighted);
    std::cout << "dataset      accuracy  precision   recall  f1-score\n";
    if (fixed) std::cout << "(fixed epsilon constant, no inner tuning)\n";
    std::cout << row << "\n";
    return 0;
}

void add_common_flags(CLI::App* cmd, CliOptions& o, bool with_eps_constant, bool with_grid,
                      bool with_folds) {
    cmd->add_option("--input", o.input, "input CSV of numeric features")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "output directory")->required();
    cmd->add_option("--seed", o.seed, "seed for every stochastic stage");
    cmd->add_option("--perplexity", o.perplexity, "neighborhood size target")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--iters", o.iters, "gradient descent iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--early-exag", o.early_exag, "early exaggeration factor")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--late-exag", o.late_exag, "late exaggeration factor (1 = off)")
        ->check(CLI::Range(1.0, 1e6));
    cmd->add_option("--late-exag-start", o.late_exag_start, "iteration where late exaggeration starts")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--learning-rate", o.learning_rate, "gradient descent step size")
        ->check(CLI::PositiveNumber);
    if (with_eps_constant)
        cmd->add_option("--eps-constant", o.eps_constant,
                        "epsilon as a fraction of the mean pairwise embedding distance")
            ->check(CLI::PositiveNumber);
    if (with_grid)
        cmd->add_option("--eps-grid", o.eps_grid, "candidate epsilon constants")
            ->delimiter(',')
            ->check(CLI::PositiveNumber);
    cmd->add_option("--min-pts", o.min_pts, "density threshold for core points")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--min-clusters", o.min_clusters,
                    "non-singleton clusters a tuned clustering must keep")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--trees", o.trees, "forest size")->check(CLI::PositiveNumber);
    cmd->add_option("--max-features", o.max_features, "per-split feature pool: sqrt, all, or count");
    if (with_folds)
        cmd->add_option("--folds", o.folds, "cross-validation folds")->check(CLI::PositiveNumber);
    cmd->add_flag("--no-standardize", o.no_standardize, "feed raw feature values downstream");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"t-SNE + density clustering + forest segmentation"};
    app.require_subcommand(1);

    CliOptions seg_opts, tune_opts, gen_opts;
    CLI::App* seg = app.add_subcommand("segment", "segment a dataset and explain the clusters");
    add_common_flags(seg, seg_opts, true, false, false);
    CLI::App* tune = app.add_subcommand("tune", "pick an epsilon constant by cross-validation");
    add_common_flags(tune, tune_opts, false, true, false);
    CLI::App* gen = app.add_subcommand("generalize", "k-fold generalization protocol");
    add_common_flags(gen, gen_opts, false, true, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (seg->parsed()) return cmd_segment(seg_opts);
        if (tune->parsed()) return cmd_tune(tune_opts);
        if (gen->parsed()) return cmd_generalize(gen_opts);
        std::cerr << "no command given\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace segmenter

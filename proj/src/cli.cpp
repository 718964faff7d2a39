#include "vertisplit/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "vertisplit/corr_metrics.hpp"
#include "vertisplit/dataset_io.hpp"
#include "vertisplit/errors.hpp"
#include "vertisplit/party_eval.hpp"
#include "vertisplit/split_correlation.hpp"
#include "vertisplit/split_importance.hpp"
#include "vertisplit/validate.hpp"

namespace vsplit::cli {

namespace {

using Json = nlohmann::json;

struct InputFlags {
    std::string path;
    std::string format = "csv";
    std::string label_column;
    std::string header = "auto";
};

struct PcorFlags {
    std::string corr = "spearman";
    std::size_t exact_dim = 100;
    std::size_t truncate_rank = 400;

    PcorOptions options() const {
        PcorOptions o;
        o.kind = parse_correlation_kind(corr);
        o.exact_dim_threshold = exact_dim;
        o.truncate_rank = truncate_rank;
        o.validate();
        return o;
    }
};

struct Settings {
    int threads = 0;
    std::uint64_t seed = 0;

    InputFlags input;
    PcorFlags pcor;
    BrkgaConfig brkga;

    // split
    std::string out_dir;
    std::string mode;
    int parties = 0;
    std::optional<double> alpha;
    std::vector<double> alpha_vec;
    bool no_guard = false;
    std::optional<double> beta;
    std::vector<std::size_t> counts;

    // metrics / estimate
    std::string manifest;
    std::vector<std::string> party_files;
    std::string labels_file;
    std::string task = "reg";
    std::size_t budget = 256;
    std::string bounds = "brkga";

    // validate
    std::string suite = "all";
};

void add_input_flags(CLI::App* cmd, InputFlags& in, bool required) {
    auto* opt = cmd->add_option("--input", in.path, "Global dataset file");
    if (required) opt->required();
    cmd->add_option("--format", in.format, "Input format")->check(CLI::IsMember({"csv", "libsvm"}));
    cmd->add_option("--label-column", in.label_column, "CSV label column (name or 0-based index)");
    cmd->add_option("--header", in.header, "CSV header row")->check(CLI::IsMember({"auto", "yes", "no"}));
}

void add_pcor_flags(CLI::App* cmd, PcorFlags& p) {
    cmd->add_option("--corr", p.corr, "Correlation kind")->check(CLI::IsMember({"spearman", "pearson"}));
    cmd->add_option("--exact-dim", p.exact_dim, "Largest spectrum dimension solved exactly");
    cmd->add_option("--truncate-rank", p.truncate_rank, "Singular values kept by truncated SVD (d_t)");
}

void add_brkga_flags(CLI::App* cmd, BrkgaConfig& b) {
    cmd->add_option("--pop", b.population_size, "BRKGA population size");
    cmd->add_option("--gens", b.max_generations, "BRKGA maximum generations");
    cmd->add_option("--elite", b.elite_fraction, "BRKGA elite fraction");
    cmd->add_option("--mutant", b.mutant_fraction, "BRKGA mutant fraction");
    cmd->add_option("--bias", b.elite_inherit_bias, "BRKGA elite inheritance probability");
    cmd->add_option("--stall", b.stall_generations, "BRKGA generations without improvement before stopping");
    cmd->add_option("--tol", b.target_tolerance, "Accepted |Icor - target| gap");
    cmd->add_flag("--no-polish{false}", b.swap_polish, "Skip the pairwise-exchange local search after BRKGA");
}

GlobalDataset load_input(const InputFlags& in) {
    if (in.format == "libsvm") return load_libsvm(in.path);
    CsvOptions o;
    if (!in.label_column.empty()) o.label_column = in.label_column;
    if (in.header != "auto") o.has_header = in.header == "yes";
    return load_csv(in.path, o);
}

Json brkga_json(const BrkgaConfig& b) {
    return {{"population_size", b.population_size},     {"elite_fraction", b.elite_fraction},
            {"mutant_fraction", b.mutant_fraction},     {"elite_inherit_bias", b.elite_inherit_bias},
            {"max_generations", b.max_generations},     {"stall_generations", b.stall_generations},
            {"target_tolerance", b.target_tolerance},   {"swap_polish", b.swap_polish}};
}

Json pcor_json(const PcorOptions& o) {
    return {{"kind", std::string(to_string(o.kind))},
            {"exact_dim_threshold", o.exact_dim_threshold},
            {"truncate_rank", o.truncate_rank}};
}

int cmd_split(Settings& s, std::ostream& out) {
    const auto ds = load_input(s.input);
    if (s.parties < 1) throw InvalidArgument("--parties must be >= 1");

    SplitManifest manifest;
    manifest.seed = s.seed;
    manifest.mode = parse_split_mode(s.mode);
    manifest.source.path = s.input.path;
    PartyPartition part;

    if (manifest.mode == SplitMode::importance) {
        if (s.beta || !s.counts.empty()) throw InvalidArgument("--beta/--counts apply to correlation mode only");
        DirichletSpec spec;
        if (!s.alpha_vec.empty()) {
            if (static_cast<int>(s.alpha_vec.size()) != s.parties)
                throw InvalidArgument("--alpha-vec needs exactly --parties values");
            spec.alphas = s.alpha_vec;
        } else {
            spec.alphas.assign(static_cast<std::size_t>(s.parties), s.alpha.value_or(1.0));
        }
        spec.guard_nonempty = !s.no_guard;
        spec.seed = s.seed;
        part = split_by_importance(ds, spec);
        manifest.params = {{"parties", s.parties}, {"alpha", spec.alphas}, {"guard_nonempty", spec.guard_nonempty}};
    } else {
        if (s.alpha || !s.alpha_vec.empty()) throw InvalidArgument("--alpha applies to importance mode only");
        if (!s.beta) throw InvalidArgument("correlation mode requires --beta");
        const auto opts = s.pcor.options();
        const auto counts = s.counts.empty() ? default_counts(ds.cols(), s.parties) : s.counts;
        if (static_cast<int>(counts.size()) != s.parties) throw InvalidArgument("--counts needs exactly --parties values");
        BrkgaConfig cfg = s.brkga;
        cfg.seed = s.seed;
        const auto res = split_by_correlation(ds, *s.beta, counts, cfg, opts);
        part = res.partition;
        manifest.corr_kind = opts.kind;
        manifest.params = {{"parties", s.parties},
                           {"beta", *s.beta},
                           {"counts", counts},
                           {"brkga", brkga_json(cfg)},
                           {"pcor", pcor_json(opts)}};
        manifest.achieved = AchievedMetrics{res.icor_achieved, res.icor_min, res.icor_max, res.icor_target, res.gap};
    }
    if (s.out_dir.empty()) throw InvalidArgument("--out is required");
    const auto written = materialize_parties(ds, part, s.out_dir, manifest);
    out << dump_manifest(written);
    return kExitOk;
}

// Global dataset plus partition from either --input/--manifest or party files.
std::pair<GlobalDataset, PartyPartition> load_partitioned(const Settings& s) {
    if (!s.party_files.empty()) {
        std::string label_name;
        if (!s.labels_file.empty()) label_name = load_csv(s.labels_file, {}).column_name(0);
        std::vector<Matrix> blocks;
        std::vector<std::string> names;
        std::vector<int> assignment;
        Eigen::Index rows = -1;
        for (std::size_t k = 0; k < s.party_files.size(); ++k) {
            CsvOptions o;
            const auto probe = load_csv(s.party_files[k], {});
            const bool has_label = !label_name.empty() && probe.column_names.size() > 1 &&
                                   std::find(probe.column_names.begin(), probe.column_names.end(), label_name) !=
                                       probe.column_names.end();
            if (has_label) o.label_column = label_name;
            const auto party = has_label ? load_csv(s.party_files[k], o) : probe;
            if (rows >= 0 && party.features.rows() != rows)
                throw InvalidArgument("party file " + s.party_files[k] + " has a different row count");
            rows = party.features.rows();
            for (std::size_t j = 0; j < party.cols(); ++j) {
                names.push_back(party.column_name(j));
                assignment.push_back(static_cast<int>(k));
            }
            blocks.push_back(party.features);
        }
        Matrix all(rows, static_cast<Eigen::Index>(assignment.size()));
        Eigen::Index col = 0;
        for (const auto& b : blocks) {
            all.middleCols(col, b.cols()) = b;
            col += b.cols();
        }
        std::optional<Vector> labels;
        if (!s.labels_file.empty()) {
            const auto l = load_csv(s.labels_file, {});
            labels = Vector(l.features.col(0));
        }
        auto ds = GlobalDataset::make(std::move(all), std::move(labels), std::move(names));
        if (!label_name.empty()) ds.label_name = label_name;
        return {std::move(ds), PartyPartition(std::move(assignment), static_cast<int>(s.party_files.size()))};
    }
    if (s.input.path.empty() || s.manifest.empty())
        throw InvalidArgument("provide --parties files or --input with --manifest");
    auto ds = load_input(s.input);
    const auto m = read_manifest(s.manifest);
    int k = 0;
    for (int a : m.assignment) k = std::max(k, a + 1);
    if (m.params.contains("parties")) k = std::max(k, m.params.at("parties").get<int>());
    if (m.assignment.size() != ds.cols())
        throw InvalidArgument("manifest assignment length does not match the dataset");
    return {std::move(ds), PartyPartition(m.assignment, k)};
}

int cmd_metrics(Settings& s, std::ostream& out) {
    const auto opts = s.pcor.options();
    const auto [ds, part] = load_partitioned(s);
    if (part.num_parties() < 2) throw InvalidArgument("Icor requires K >= 2 parties");
    if (!part.all_nonempty()) throw InvalidArgument("every party must own at least one feature");
    IcorEvaluator eval(ds.features, opts);
    const Matrix table = eval.table(part.groups(), true);
    Json matrix = Json::array();
    std::vector<double> inner;
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        std::vector<double> row;
        for (Eigen::Index j = 0; j < table.cols(); ++j) row.push_back(table(i, j));
        matrix.push_back(row);
        inner.push_back(table(i, i));
    }
    Json report = {{"pcor_matrix", matrix},
                   {"inner_pcor", inner},
                   {"icor", icor_from_table(table)},
                   {"options", pcor_json(opts)}};
    out << report.dump(2) << "\n";
    return kExitOk;
}

int cmd_estimate(Settings& s, std::ostream& out) {
    if (s.party_files.empty()) throw InvalidArgument("estimate requires --parties");
    if (s.labels_file.empty()) throw InvalidArgument("estimate requires --labels");
    const auto opts = s.pcor.options();
    const auto [ds, part] = load_partitioned(s);
    if (part.num_parties() < 2) throw InvalidArgument("estimate requires K >= 2 parties");

    RidgeGameOptions game_opts;
    game_opts.task = s.task == "cls" ? TaskKind::classification : TaskKind::regression;
    game_opts.seed = s.seed;
    const RidgeGame game(ds.features, *ds.labels, part.groups(), game_opts);
    const auto shapley = party_shapley(part.num_parties(), std::cref(game), s.budget, s.seed);

    Json report;
    report["shapley"] = {{"per_party", shapley.per_party},
                         {"method", std::string(to_string(shapley.method))},
                         {"samples", shapley.samples},
                         {"std_error", shapley.std_error}};
    const auto alpha = estimate_alpha(shapley);
    report["alpha_vec"] = alpha.alpha_vec;
    report["symmetric_alpha"] = alpha.symmetric_alpha;

    BrkgaConfig cfg = s.brkga;
    cfg.seed = s.seed;
    IcorEvaluator eval(ds.features, opts);
    const auto beta = estimate_beta(eval, part, cfg, s.bounds == "shuffle" ? BoundsMethod::shuffle : BoundsMethod::brkga);
    report["beta"] = beta.beta;
    report["icor_real"] = beta.icor_real;
    report["icor_min"] = beta.icor_min;
    report["icor_max"] = beta.icor_max;
    out << report.dump(2) << "\n";
    return kExitOk;
}

int cmd_validate(Settings& s, std::ostream& out, std::ostream& err) {
    std::vector<std::string> suites;
    if (s.suite == "all")
        suites = validate::suite_names();
    else
        suites.push_back(s.suite);
    validate::SuiteOptions o;
    o.seed = s.seed;
    bool all_ok = true;
    Json report = Json::array();
    for (const auto& name : suites) {
        const auto r = validate::run_suite(name, o);
        all_ok = all_ok && r.passed;
        err << (r.passed ? "PASS " : "FAIL ") << name << ": " << r.summary << "\n";
        report.push_back({{"suite", name}, {"passed", r.passed}, {"summary", r.summary},
                          {"seconds", r.seconds}, {"details", r.details}});
    }
    out << Json{{"passed", all_ok}, {"suites", report}}.dump(2) << "\n";
    return all_ok ? kExitOk : kExitValidationFailed;
}

void apply_threads(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv(kThreadsEnv)) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Settings s;
    CLI::App app{"Synthesize and evaluate vertically partitioned datasets"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.add_option("--threads", s.threads, std::string("Worker threads (0: $") + kThreadsEnv + " or OpenMP default)");

    auto* split = app.add_subcommand("split", "Split a global dataset into parties");
    add_input_flags(split, s.input, true);
    split->add_option("--out", s.out_dir, "Output directory")->required();
    split->add_option("--mode", s.mode, "Split mode")->required()->check(CLI::IsMember({"importance", "correlation"}));
    split->add_option("--parties", s.parties, "Number of parties K")->required();
    auto* alpha = split->add_option("--alpha", s.alpha, "Symmetric Dirichlet concentration (default 1)");
    auto* alpha_vec = split->add_option("--alpha-vec", s.alpha_vec, "Per-party Dirichlet concentrations")->delimiter(',');
    alpha->excludes(alpha_vec);
    split->add_flag("--no-guard", s.no_guard, "Allow empty parties in importance mode");
    split->add_option("--beta", s.beta, "Correlation level in [0, 1]");
    split->add_option("--counts", s.counts, "Features per party (default: equal)")->delimiter(',');
    split->add_option("--seed", s.seed, "Random seed");
    split->add_option("--threads", s.threads, "Worker threads");
    add_pcor_flags(split, s.pcor);
    add_brkga_flags(split, s.brkga);

    auto* metrics = app.add_subcommand("metrics", "Report Pcor/Icor of a partition");
    add_input_flags(metrics, s.input, false);
    metrics->add_option("--manifest", s.manifest, "Manifest holding the assignment");
    metrics->add_option("--parties", s.party_files, "Per-party CSV files")->delimiter(',');
    metrics->add_option("--labels", s.labels_file, "Labels CSV (its column is dropped from party files)");
    metrics->add_option("--threads", s.threads, "Worker threads");
    add_pcor_flags(metrics, s.pcor);

    auto* estimate = app.add_subcommand("estimate", "Estimate alpha and beta of an existing partition");
    estimate->add_option("--parties", s.party_files, "Per-party CSV files")->delimiter(',')->required();
    estimate->add_option("--labels", s.labels_file, "Labels CSV")->required();
    estimate->add_option("--task", s.task, "Prediction task")->check(CLI::IsMember({"reg", "cls"}));
    estimate->add_option("--budget", s.budget, "Shapley permutations when K > 10");
    estimate->add_option("--bounds", s.bounds, "Icor bound search")->check(CLI::IsMember({"brkga", "shuffle"}));
    estimate->add_option("--seed", s.seed, "Random seed");
    estimate->add_option("--threads", s.threads, "Worker threads");
    add_pcor_flags(estimate, s.pcor);
    add_brkga_flags(estimate, s.brkga);

    auto* val = app.add_subcommand("validate", "Run the built-in property and oracle harnesses");
    std::vector<std::string> choices = validate::suite_names();
    choices.push_back("all");
    val->add_option("--suite", s.suite, "Harness to run")->check(CLI::IsMember(choices));
    val->add_option("--seed", s.seed, "Random seed");
    val->add_option("--threads", s.threads, "Worker threads");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error: usage: " << e.what() << "\n";
        return kExitError;
    }

    try {
        apply_threads(s.threads);
        if (*split) return cmd_split(s, out);
        if (*metrics) return cmd_metrics(s, out);
        if (*estimate) return cmd_estimate(s, out);
        if (*val) return cmd_validate(s, out, err);
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace vsplit::cli

// ecgbeat: staged command-line driver for the beat classification pipeline.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "ecgbeat/balance.hpp"
#include "ecgbeat/cv.hpp"
#include "ecgbeat/encode.hpp"
#include "ecgbeat/errors.hpp"
#include "ecgbeat/metrics.hpp"
#include "ecgbeat/model.hpp"
#include "ecgbeat/pipeline.hpp"
#include "ecgbeat/record_io.hpp"
#include "ecgbeat/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ecgbeat;
using cli::PipelineConfig;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- layout

struct Layout {
    fs::path root;
    fs::path raw() const { return root / "raw"; }
    fs::path beats() const { return root / "beats"; }
    fs::path features() const { return root / "features"; }
    fs::path images() const { return root / "images"; }
    fs::path models() const { return root / "models"; }
    fs::path reports() const { return root / "reports"; }
    fs::path signal(const std::string& name) const { return raw() / (name + ".signal.csv"); }
    fs::path annotations(const std::string& name) const { return raw() / (name + ".ann.csv"); }
    fs::path beat_table(const std::string& name) const { return beats() / (name + ".beats.csv"); }
    fs::path train() const { return features() / "train.csv"; }
    fs::path train_balanced() const { return features() / "train_balanced.csv"; }
    fs::path test() const { return features() / "test.csv"; }
    fs::path model(const std::string& kind) const { return models() / (kind + ".model.txt"); }
};

std::string model_title(ModelKind kind) { return kind == ModelKind::gbdt ? "GBDT" : "Random forest"; }

// ---------------------------------------------------------------- manifests

fs::path manifest_path(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

std::string file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return cli::fnv1a_hex(ss.str());
}

void require_input(const fs::path& path, const std::string& producer) {
    if (!fs::exists(path))
        throw IoError("missing input " + path.string() + " (produced by `ecgbeat " + producer + "`)");
}

struct Context {
    PipelineConfig cfg;
    std::string hash;
    Layout layout;
};

/// Workdir-relative where possible, so manifests do not depend on where the workdir lives.
std::string display_path(const Context& ctx, const fs::path& p) {
    const auto rel = p.lexically_normal().lexically_relative(ctx.layout.root.lexically_normal());
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    return p.generic_string();
}

/// Sidecar `<output>.manifest.json`. No timestamps, so reruns are byte-identical.
void write_manifest(const Context& ctx, const fs::path& output, const std::string& stage,
                    const std::vector<fs::path>& inputs, json meta = json::object()) {
    json j;
    j["tool"] = "ecgbeat";
    j["version"] = kVersion;
    j["stage"] = stage;
    j["config_hash"] = ctx.hash;
    j["config"] = ctx.cfg.to_json();
    j["config"].erase("workdir");
    json in = json::array();
    for (const auto& p : inputs) in.push_back({{"path", display_path(ctx, p)}, {"fnv1a", file_hash(p)}});
    j["inputs"] = in;
    j["output"] = {{"path", display_path(ctx, output)}, {"fnv1a", fs::is_regular_file(output) ? file_hash(output) : ""}};
    j["meta"] = std::move(meta);
    std::ofstream out(manifest_path(output), std::ios::binary);
    if (!out) throw IoError("cannot write " + manifest_path(output).string());
    out << j.dump(2) << '\n';
}

json read_manifest(const fs::path& output) {
    const auto path = manifest_path(output);
    require_input(path, "the stage that wrote " + output.filename().string());
    std::ifstream in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string(), 1, e.what());
    }
}

std::string manifest_role(const fs::path& output) {
    const json m = read_manifest(output);
    return m.value("meta", json::object()).value("role", "");
}

/// Input must carry a train role; the test split is never a training input.
void require_train_role(const fs::path& input, const std::string& stage) {
    const auto role = manifest_role(input);
    if (role == "test")
        throw ValidationError(stage + " refuses " + input.string() +
                              ": it is the held-out test split and must stay untouched");
    if (role != "train") throw ValidationError(stage + ": " + input.string() + " is not a training split");
}

std::vector<std::string> record_names(const Layout& layout, const std::optional<std::string>& only) {
    if (only) return {*only};
    std::vector<std::string> names;
    if (fs::is_directory(layout.raw()))
        for (const auto& e : fs::directory_iterator(layout.raw())) {
            const auto file = e.path().filename().string();
            const std::string suffix = ".signal.csv";
            if (file.size() > suffix.size() && file.ends_with(suffix))
                names.push_back(file.substr(0, file.size() - suffix.size()));
        }
    std::sort(names.begin(), names.end());
    if (names.empty())
        throw IoError("no records under " + layout.raw().string() + " (run `ecgbeat ingest` or `ecgbeat synth`)");
    return names;
}

std::map<std::string, std::size_t> class_counts(const LabelSet& labels, std::span<const ClassId> ys) {
    std::map<std::string, std::size_t> out;
    for (ClassId y : ys) ++out[labels.symbol(y)];
    return out;
}

// ---------------------------------------------------------------- stages

void save_raw(const Context& ctx, const EcgRecord& rec, const std::string& name, const std::string& stage,
              const std::vector<fs::path>& inputs) {
    const auto& L = ctx.layout;
    fs::create_directories(L.raw());
    save_record(rec, ctx.cfg.label_set(), L.signal(name), L.annotations(name));
    const json meta{{"fs", rec.fs}, {"samples", rec.length()}, {"beats", rec.rpeaks.size()}};
    write_manifest(ctx, L.signal(name), stage, inputs, meta);
    write_manifest(ctx, L.annotations(name), stage, inputs, meta);
}

void run_ingest(const Context& ctx, const fs::path& signal, const fs::path& annotations, std::string name) {
    require_input(signal, "ingest");
    require_input(annotations, "ingest");
    LoadOptions opt;
    opt.lead = ctx.cfg.lead;
    opt.strict = ctx.cfg.strict_labels;
    opt.labels = ctx.cfg.label_set();
    const auto loaded = load_record(signal, annotations, ctx.cfg.fs, opt);
    if (name.empty()) {
        name = signal.stem().string();
        if (name.ends_with(".signal")) name.resize(name.size() - 7);
    }
    save_raw(ctx, loaded.record, name, "ingest", {signal, annotations});
    std::cout << "ingested " << name << ": " << loaded.record.length() << " samples at " << ctx.cfg.fs << " Hz, "
              << loaded.record.rpeaks.size() << " beats";
    if (loaded.skipped_unknown_labels) std::cout << ", " << loaded.skipped_unknown_labels << " unknown labels skipped";
    std::cout << '\n';
}

void run_synth(const Context& ctx, const std::string& name) {
    SynthConfig sc = ctx.cfg.synth;
    sc.seed = ctx.cfg.seed;
    const auto rec = generate(sc);
    save_raw(ctx, rec, name, "synth", {});
    std::cout << "synthesized " << name << ": " << rec.length() << " samples at " << rec.fs << " Hz, "
              << rec.rpeaks.size() << " beats\n";
}

void run_preprocess(const Context& ctx, const std::optional<std::string>& only) {
    const auto& L = ctx.layout;
    fs::create_directories(L.beats());
    for (const auto& name : record_names(L, only)) {
        require_input(L.signal(name), "ingest");
        require_input(L.annotations(name), "ingest");
        const double rec_fs = read_manifest(L.signal(name)).at("meta").at("fs").get<double>();
        LoadOptions opt;
        opt.labels = ctx.cfg.label_set();
        const auto loaded = load_record(L.signal(name), L.annotations(name), rec_fs, opt);
        PreprocessConfig pc = ctx.cfg.preprocess;
        pc.lead = 0;
        const auto processed = preprocess_record(loaded.record, pc);
        save_beats(processed, L.beat_table(name));
        write_manifest(ctx, L.beat_table(name), "preprocess", {L.signal(name), L.annotations(name)},
                       {{"beats", processed.beats.size()}, {"dropped", processed.dropped}});
        std::cout << "preprocessed " << name << ": " << processed.beats.size() << " beats, " << processed.dropped
                  << " dropped at record edges\n";
    }
}

void run_featurize(const Context& ctx) {
    const auto& L = ctx.layout;
    std::vector<fs::path> inputs;
    if (fs::is_directory(L.beats()))
        for (const auto& e : fs::directory_iterator(L.beats()))
            if (e.path().string().ends_with(".beats.csv")) inputs.push_back(e.path());
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) throw IoError("missing input " + L.beats().string() + "/*.beats.csv (run `ecgbeat preprocess`)");

    std::vector<double> values;
    std::vector<ClassId> labels;
    for (const auto& p : inputs) {
        const auto rows = featurize(load_beats(p));
        values.insert(values.end(), rows.rows.data().begin(), rows.rows.data().end());
        labels.insert(labels.end(), rows.labels.begin(), rows.labels.end());
    }
    Matrix all(labels.size(), kFeatureDim);
    all.data() = std::move(values);
    if (labels.empty()) throw ValidationError("featurize: no beats to featurize");

    const auto split = stratified_split(labels, ctx.cfg.test_fraction, ctx.cfg.seed);
    const auto train = select_rows(all, labels, split.train);
    const auto test = select_rows(all, labels, split.test);
    fs::create_directories(L.features());
    const auto set = ctx.cfg.label_set();
    save_feature_matrix(train.rows, train.labels, L.train());
    write_manifest(ctx, L.train(), "featurize", inputs,
                   {{"role", "train"}, {"rows", train.labels.size()}, {"classes", class_counts(set, train.labels)}});
    save_feature_matrix(test.rows, test.labels, L.test());
    write_manifest(ctx, L.test(), "featurize", inputs,
                   {{"role", "test"}, {"rows", test.labels.size()}, {"classes", class_counts(set, test.labels)}});
    std::cout << "featurized " << labels.size() << " beats: " << train.labels.size() << " train, "
              << test.labels.size() << " test\n";
}

void run_balance(const Context& ctx, fs::path input, fs::path output) {
    const auto& L = ctx.layout;
    if (input.empty()) input = L.train();
    if (output.empty()) output = L.train_balanced();
    require_input(input, "featurize");
    require_train_role(input, "balance");
    const auto data = load_feature_matrix(input);
    const auto out = balance(data.rows, data.labels, ctx.cfg.balance_plan());
    fs::create_directories(output.parent_path());
    save_feature_matrix(out.rows, out.labels, output);
    const auto set = ctx.cfg.label_set();
    write_manifest(ctx, output, "balance", {input},
                   {{"role", "train"}, {"rows", out.labels.size()}, {"classes", class_counts(set, out.labels)}});
    std::cout << "balanced " << data.labels.size() << " -> " << out.labels.size() << " rows\n";
}

void run_encode(const Context& ctx, const std::optional<std::string>& only) {
    const auto& L = ctx.layout;
    const MtfConfig mtf{ctx.cfg.mtf_bins};
    for (const auto& name : record_names(L, only)) {
        const auto table = L.beat_table(name);
        require_input(table, "preprocess");
        const auto processed = load_beats(table);
        const auto dir = L.images() / name;
        if (fs::is_directory(dir))
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().filename().string().starts_with("beat_")) fs::remove(e.path());
        fs::create_directories(dir);
        json files = json::array();
        for (std::size_t i = 0; i < processed.beats.size(); ++i) {
            char stem[32];
            std::snprintf(stem, sizeof stem, "beat_%06zu", i);
            export_image(encode_beat(processed.beats[i].samples, mtf), dir / stem);
            files.push_back({{"stem", stem},
                             {"label", ctx.cfg.label_set().symbol(processed.beats[i].label)},
                             {"rpeak_index", processed.beats[i].rpeak_index}});
        }
        // One manifest for the directory: per-file sidecars would triple the file count.
        write_manifest(ctx, dir / "images", "encode", {table},
                       {{"beats", processed.beats.size()}, {"image_side", kImageSide}, {"files", files}});
        std::cout << "encoded " << name << ": " << processed.beats.size() << " beats -> " << dir.string() << '\n';
    }
}

void run_train(const Context& ctx, fs::path input) {
    const auto& L = ctx.layout;
    if (input.empty()) input = fs::exists(L.train_balanced()) ? L.train_balanced() : L.train();
    require_input(input, "featurize");
    require_train_role(input, "train");
    const auto data = load_feature_matrix(input);
    ModelSpec spec;
    if (ctx.cfg.model == "rf") {
        RfParams p = ctx.cfg.rf;
        p.seed = ctx.cfg.seed;
        spec = p;
    } else {
        GbdtParams p = ctx.cfg.gbdt;
        p.seed = ctx.cfg.seed;
        spec = p;
    }
    const auto model = fit_model(spec, data.rows, data.labels, ctx.cfg.labels.size());
    fs::create_directories(L.models());
    const auto out = L.model(ctx.cfg.model);
    save_model(model, out);
    write_manifest(ctx, out, "train", {input}, {{"params", describe(spec)}, {"rows", data.labels.size()}});
    std::cout << "trained " << describe(spec) << " on " << data.labels.size() << " rows -> " << out.string() << '\n';
}

void run_evaluate(const Context& ctx, fs::path test, fs::path model_file) {
    const auto& L = ctx.layout;
    if (test.empty()) test = L.test();
    if (model_file.empty()) model_file = L.model(ctx.cfg.model);
    require_input(test, "featurize");
    require_input(model_file, "train");
    const json m = read_manifest(test);
    if (m.value("meta", json::object()).value("role", "") != "test")
        throw ValidationError("evaluate: " + test.string() + " is not the held-out test split");
    if (m.at("output").value("fnv1a", "") != file_hash(test))
        throw ValidationError("evaluate: " + test.string() + " changed after featurize wrote it");

    const auto data = load_feature_matrix(test);
    const auto model = load_model(model_file);
    const auto pred = predict_labels(model, data.rows);
    const ReportRow row{model_title(model.kind), macro_metrics(confusion_matrix(data.labels, pred, model.n_classes))};
    fs::create_directories(L.reports());
    const auto out = L.reports() / (ctx.cfg.model + ".metrics.csv");
    {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw IoError("cannot write " + out.string());
        write_metrics_csv(std::span<const ReportRow>(&row, 1), f);
    }
    write_manifest(ctx, out, "evaluate", {test, model_file}, {{"rows", data.labels.size()}});
    write_metrics_table(std::span<const ReportRow>(&row, 1), std::cout);
}

void run_gridsearch(const Context& ctx, fs::path input) {
    const auto& L = ctx.layout;
    if (input.empty()) input = L.train();
    require_input(input, "featurize");
    require_train_role(input, "gridsearch");
    const auto data = load_feature_matrix(input);
    const auto grid = cli::model_grid(ctx.cfg);
    std::optional<BalancePlan> plan;
    if (ctx.cfg.grid_balance) plan = ctx.cfg.balance_plan();
    const auto result =
        grid_search(data.rows, data.labels, grid, ctx.cfg.folds, ctx.cfg.seed, plan, ctx.cfg.labels.size());

    fs::create_directories(L.reports());
    const auto out = L.reports() / ("gridsearch_" + ctx.cfg.model + ".csv");
    std::ofstream f(out, std::ios::binary);
    if (!f) throw IoError("cannot write " + out.string());
    f << "index,params";
    for (std::size_t k = 0; k < ctx.cfg.folds; ++k) f << ",fold" << k << "_f1";
    f << ",mean_f1,best\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f << i << ",\"" << describe(grid[i]) << '"';
        for (double v : result.fold_f1[i]) f << ',' << format_double(v);
        f << ',' << format_double(result.mean_f1[i]) << ',' << (i == result.best ? 1 : 0) << '\n';
        std::printf("%s %-60s mean F1 %.4f\n", i == result.best ? "*" : " ", describe(grid[i]).c_str(),
                    result.mean_f1[i]);
    }
    f.close();
    write_manifest(ctx, out, "gridsearch", {input},
                   {{"best", describe(grid[result.best])}, {"best_mean_f1", result.mean_f1[result.best]}});
}

void run_report(const Context& ctx) {
    const auto& L = ctx.layout;
    std::vector<fs::path> inputs;
    if (fs::is_directory(L.reports()))
        for (const auto& e : fs::directory_iterator(L.reports()))
            if (e.path().string().ends_with(".metrics.csv")) inputs.push_back(e.path());
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty())
        throw IoError("missing input " + L.reports().string() + "/*.metrics.csv (run `ecgbeat evaluate`)");
    std::vector<ReportRow> rows;
    for (const auto& p : inputs) {
        std::ifstream in(p);
        for (auto& r : read_metrics_csv(in)) rows.push_back(std::move(r));
    }
    const auto out = L.reports() / "table.txt";
    {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw IoError("cannot write " + out.string());
        write_metrics_table(rows, f);
    }
    write_manifest(ctx, out, "report", inputs);
    write_metrics_table(rows, std::cout);
}

// ---------------------------------------------------------------- config

struct Overrides {
    std::string config_file;
    std::optional<std::string> workdir, targets, model;
    std::optional<double> fs, low_hz, high_hz, target_fs, test_fraction;
    std::optional<std::size_t> mtf_bins, folds, rounds;
    std::optional<std::uint64_t> seed;
};

/// Defaults <- config file <- flags, then every precondition at once.
PipelineConfig build_config(const Overrides& o) {
    PipelineConfig cfg;
    std::vector<std::string> errors;
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in) throw IoError("cannot read config file " + o.config_file);
        try {
            cli::merge_json(cfg, json::parse(in, nullptr, true, /*ignore_comments=*/true), errors);
        } catch (const json::parse_error& e) {
            throw ValidationError("config file " + o.config_file + ": " + e.what());
        }
    }
    if (o.workdir) cfg.workdir = *o.workdir;
    if (o.fs) cfg.fs = *o.fs;
    if (o.low_hz) cfg.preprocess.low_hz = *o.low_hz;
    if (o.high_hz) cfg.preprocess.high_hz = *o.high_hz;
    if (o.target_fs) cfg.preprocess.target_fs = *o.target_fs;
    if (o.test_fraction) cfg.test_fraction = *o.test_fraction;
    if (o.mtf_bins) cfg.mtf_bins = *o.mtf_bins;
    if (o.folds) cfg.folds = *o.folds;
    if (o.seed) cfg.seed = *o.seed;
    if (o.model) cfg.model = *o.model;
    if (o.rounds) {
        cfg.gbdt.n_estimators = *o.rounds;
        cfg.rf.n_trees = *o.rounds;
    }
    if (o.targets) {
        try {
            cfg.targets = cli::parse_targets(*o.targets);
        } catch (const ValidationError& e) {
            errors.push_back(e.what());
        }
    }
    for (auto& e : cli::validate(cfg)) errors.push_back(std::move(e));
    if (!errors.empty()) {
        std::string msg = std::to_string(errors.size()) + " configuration error(s):";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ValidationError(msg);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ECG heartbeat classification pipeline"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    Overrides o;
    app.add_option("--config", o.config_file, "JSON config file (flags override it)");
    app.add_option("--workdir", o.workdir, "Directory holding every stage's outputs");
    app.add_option("--fs", o.fs, "Sampling rate of ingested signals, Hz");
    app.add_option("--low-hz", o.low_hz, "Band-pass lower edge, Hz");
    app.add_option("--high-hz", o.high_hz, "Band-pass upper edge, Hz");
    app.add_option("--target-fs", o.target_fs, "Resampling target, Hz");
    app.add_option("--mtf-bins", o.mtf_bins, "Quantile bins of the Markov transition field");
    app.add_option("--seed", o.seed, "Seed for every random stage");
    app.add_option("--targets", o.targets, "Balance targets, e.g. N=300000,S=100000,V=100000");
    app.add_option("--model", o.model, "gbdt or rf");
    app.add_option("--folds", o.folds, "Cross-validation folds for gridsearch");
    app.add_option("--test-fraction", o.test_fraction, "Held-out fraction per class");
    app.add_option("--rounds", o.rounds, "Boosting rounds (gbdt) or trees (rf)");

    std::string signal, annotations, name, synth_name = "synth";
    std::optional<std::string> record;
    std::optional<std::size_t> beats_per_class;
    std::optional<double> noise_std;
    std::string input, output, test, model_file;
    bool grid_balance = false;

    auto* ingest = app.add_subcommand("ingest", "Load a signal CSV + annotation CSV into the workdir");
    ingest->add_option("--signal", signal, "Signal CSV (one or two columns)")->required();
    ingest->add_option("--annotations", annotations, "Annotation CSV (sample_index,label)")->required();
    ingest->add_option("--name", name, "Record name (default: signal file stem)");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled record");
    synth->add_option("--name", synth_name, "Record name");
    synth->add_option("--beats-per-class", beats_per_class, "Beats of each class");
    synth->add_option("--noise-std", noise_std, "White noise standard deviation, mV");

    auto* preprocess = app.add_subcommand("preprocess", "Resample, filter, segment and normalize beats");
    preprocess->add_option("--record", record, "Only this record");

    app.add_subcommand("featurize", "Build 76-value feature rows and the stratified train/test split");

    auto* balance_cmd = app.add_subcommand("balance", "Undersample + SMOTE the training split");
    balance_cmd->add_option("--input", input, "Training features (default: features/train.csv)");
    balance_cmd->add_option("--output", output, "Output (default: features/train_balanced.csv)");

    auto* encode = app.add_subcommand("encode", "Write GASF / MTF / RP images for every beat");
    encode->add_option("--record", record, "Only this record");

    auto* train = app.add_subcommand("train", "Fit the configured model");
    train->add_option("--input", input, "Training features (default: balanced if present, else train.csv)");

    auto* evaluate = app.add_subcommand("evaluate", "Score the model on the held-out test split");
    evaluate->add_option("--test", test, "Test features (default: features/test.csv)");
    evaluate->add_option("--model-file", model_file, "Model file (default: models/<model>.model.txt)");

    auto* grid = app.add_subcommand("gridsearch", "Stratified k-fold search over the configured grid");
    grid->add_option("--input", input, "Training features (default: features/train.csv)");
    grid->add_flag("--balance", grid_balance, "Balance each fold's training part");

    app.add_subcommand("report", "Render every evaluated model as one metrics table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Context ctx;
        ctx.cfg = build_config(o);
        if (beats_per_class) ctx.cfg.synth.beats_per_class = *beats_per_class;
        if (noise_std) ctx.cfg.synth.noise_std = *noise_std;
        if (grid_balance) ctx.cfg.grid_balance = true;
        ctx.cfg.synth.validate();
        ctx.hash = cli::config_hash(ctx.cfg);
        ctx.layout = Layout{ctx.cfg.workdir};

        const auto* sub = app.get_subcommands().front();
        const std::string cmd = sub->get_name();
        if (cmd == "ingest") run_ingest(ctx, signal, annotations, name);
        else if (cmd == "synth") run_synth(ctx, synth_name);
        else if (cmd == "preprocess") run_preprocess(ctx, record);
        else if (cmd == "featurize") run_featurize(ctx);
        else if (cmd == "balance") run_balance(ctx, input, output);
        else if (cmd == "encode") run_encode(ctx, record);
        else if (cmd == "train") run_train(ctx, input);
        else if (cmd == "evaluate") run_evaluate(ctx, test, model_file);
        else if (cmd == "gridsearch") run_gridsearch(ctx, input);
        else if (cmd == "report") run_report(ctx);
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

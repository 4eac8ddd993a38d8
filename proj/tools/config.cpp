#include "config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <type_traits>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ecgbeat/errors.hpp"

namespace ecgbeat::cli {

using nlohmann::json;

namespace {

template <typename T>
json grid_values(const std::vector<T>& v) {
    return json(v);
}

// Typed reader that records a message instead of throwing.
class Reader {
public:
    Reader(const json& j, std::string prefix, std::vector<std::string>& errors)
        : j_(j), prefix_(std::move(prefix)), errors_(errors) {
        if (!j_.is_object()) errors_.push_back(where("") + "must be an object");
    }

    ~Reader() {
        if (!j_.is_object()) return;
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) errors_.push_back(where(key) + "unknown key");
    }

    template <typename T>
    void read(const std::string& key, T& out) {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key)) return;
        const json& v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) return bad(key, "expected true or false");
            out = v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) return bad(key, "expected a string");
            out = v.get<std::string>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) return bad(key, "expected a number");
            out = v.get<T>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_unsigned()) return bad(key, "expected a non-negative integer");
            out = v.get<T>();
        } else {
            try {
                out = v.get<T>();
            } catch (const json::exception&) {
                bad(key, "has the wrong type");
            }
        }
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key)) return nullptr;
        return &j_.at(key);
    }

    std::string where(const std::string& key) const {
        std::string path = prefix_.empty() ? key : key.empty() ? prefix_ : prefix_ + "." + key;
        return "config " + (path.empty() ? std::string("root") : path) + ": ";
    }

private:
    void bad(const std::string& key, const std::string& what) { errors_.push_back(where(key) + what); }

    const json& j_;
    std::string prefix_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

template <typename F>
void check(std::vector<std::string>& errors, const std::string& what, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        errors.push_back(what + ": " + e.what());
    }
}

}  // namespace

BalancePlan PipelineConfig::balance_plan() const {
    const auto set = label_set();
    BalancePlan plan;
    plan.targets.clear();
    for (const auto& [symbol, n] : targets) {
        const auto id = set.find(symbol);
        if (!id) throw ValidationError("balance target for unknown label '" + symbol + "'");
        plan.targets[*id] = n;
    }
    plan.k_neighbors = k_neighbors;
    plan.seed = seed;
    return plan;
}

json PipelineConfig::to_json() const {
    return json{
        {"workdir", workdir.generic_string()},
        {"seed", seed},
        {"labels", labels},
        {"ingest", {{"fs", fs}, {"lead", lead}, {"strict_labels", strict_labels}}},
        {"preprocess",
         {{"target_fs", preprocess.target_fs}, {"low_hz", preprocess.low_hz}, {"high_hz", preprocess.high_hz}}},
        {"split", {{"test_fraction", test_fraction}}},
        {"balance", {{"targets", targets}, {"k_neighbors", k_neighbors}}},
        {"encode", {{"mtf_bins", mtf_bins}}},
        {"model", model},
        {"gbdt",
         {{"learning_rate", gbdt.learning_rate},
          {"max_depth", gbdt.max_depth},
          {"n_estimators", gbdt.n_estimators},
          {"min_data_in_leaf", gbdt.min_data_in_leaf},
          {"l1_alpha", gbdt.l1_alpha},
          {"l2_lambda", gbdt.l2_lambda}}},
        {"rf",
         {{"n_trees", rf.n_trees},
          {"max_depth", rf.max_depth},
          {"min_samples_leaf", rf.min_samples_leaf},
          {"features_per_split", rf.features_per_split},
          {"bootstrap", rf.bootstrap}}},
        {"gridsearch",
         {{"folds", folds},
          {"balance", grid_balance},
          {"gbdt",
           {{"learning_rate", grid_values(gbdt_grid.learning_rate)},
            {"max_depth", grid_values(gbdt_grid.max_depth)},
            {"n_estimators", grid_values(gbdt_grid.n_estimators)}}},
          {"rf", {{"n_trees", grid_values(rf_grid.n_trees)}, {"max_depth", grid_values(rf_grid.max_depth)}}}}},
        {"synth",
         {{"beats_per_class", synth.beats_per_class},
          {"fs", synth.fs},
          {"noise_std", synth.noise_std},
          {"base_rr", synth.base_rr},
          {"rr_jitter", synth.rr_jitter},
          {"premature_factor", synth.premature_factor}}},
    };
}

void merge_json(PipelineConfig& cfg, const json& j, std::vector<std::string>& errors) {
    Reader root(j, "", errors);
    std::string workdir = cfg.workdir.string();
    root.read("workdir", workdir);
    cfg.workdir = workdir;
    root.read("seed", cfg.seed);
    root.read("labels", cfg.labels);
    root.read("model", cfg.model);

    if (const json* s = root.child("ingest")) {
        Reader r(*s, "ingest", errors);
        r.read("fs", cfg.fs);
        r.read("lead", cfg.lead);
        r.read("strict_labels", cfg.strict_labels);
    }
    if (const json* s = root.child("preprocess")) {
        Reader r(*s, "preprocess", errors);
        r.read("target_fs", cfg.preprocess.target_fs);
        r.read("low_hz", cfg.preprocess.low_hz);
        r.read("high_hz", cfg.preprocess.high_hz);
    }
    if (const json* s = root.child("split")) {
        Reader r(*s, "split", errors);
        r.read("test_fraction", cfg.test_fraction);
    }
    if (const json* s = root.child("balance")) {
        Reader r(*s, "balance", errors);
        r.read("targets", cfg.targets);
        r.read("k_neighbors", cfg.k_neighbors);
    }
    if (const json* s = root.child("encode")) {
        Reader r(*s, "encode", errors);
        r.read("mtf_bins", cfg.mtf_bins);
    }
    if (const json* s = root.child("gbdt")) {
        Reader r(*s, "gbdt", errors);
        r.read("learning_rate", cfg.gbdt.learning_rate);
        r.read("max_depth", cfg.gbdt.max_depth);
        r.read("n_estimators", cfg.gbdt.n_estimators);
        r.read("min_data_in_leaf", cfg.gbdt.min_data_in_leaf);
        r.read("l1_alpha", cfg.gbdt.l1_alpha);
        r.read("l2_lambda", cfg.gbdt.l2_lambda);
    }
    if (const json* s = root.child("rf")) {
        Reader r(*s, "rf", errors);
        r.read("n_trees", cfg.rf.n_trees);
        r.read("max_depth", cfg.rf.max_depth);
        r.read("min_samples_leaf", cfg.rf.min_samples_leaf);
        r.read("features_per_split", cfg.rf.features_per_split);
        r.read("bootstrap", cfg.rf.bootstrap);
    }
    if (const json* s = root.child("gridsearch")) {
        Reader r(*s, "gridsearch", errors);
        r.read("folds", cfg.folds);
        r.read("balance", cfg.grid_balance);
        if (const json* g = r.child("gbdt")) {
            Reader rg(*g, "gridsearch.gbdt", errors);
            rg.read("learning_rate", cfg.gbdt_grid.learning_rate);
            rg.read("max_depth", cfg.gbdt_grid.max_depth);
            rg.read("n_estimators", cfg.gbdt_grid.n_estimators);
        }
        if (const json* g = r.child("rf")) {
            Reader rg(*g, "gridsearch.rf", errors);
            rg.read("n_trees", cfg.rf_grid.n_trees);
            rg.read("max_depth", cfg.rf_grid.max_depth);
        }
    }
    if (const json* s = root.child("synth")) {
        Reader r(*s, "synth", errors);
        r.read("beats_per_class", cfg.synth.beats_per_class);
        r.read("fs", cfg.synth.fs);
        r.read("noise_std", cfg.synth.noise_std);
        r.read("base_rr", cfg.synth.base_rr);
        r.read("rr_jitter", cfg.synth.rr_jitter);
        r.read("premature_factor", cfg.synth.premature_factor);
    }
}

std::vector<std::string> validate(const PipelineConfig& c) {
    std::vector<std::string> errors;
    check(errors, "labels", [&] { c.label_set(); });
    if (!(c.fs > 0.0) || !std::isfinite(c.fs)) errors.push_back("ingest.fs: must be a positive number");
    if (c.lead > 1) errors.push_back("ingest.lead: must be 0 or 1");
    const auto& p = c.preprocess;
    if (!(p.target_fs > 0.0) || !std::isfinite(p.target_fs))
        errors.push_back("preprocess.target_fs: must be a positive number");
    if (!(p.low_hz > 0.0 && p.low_hz < p.high_hz))
        errors.push_back("preprocess: need 0 < low_hz < high_hz");
    if (!(p.high_hz < p.target_fs / 2.0)) errors.push_back("preprocess.high_hz: must be below target_fs / 2");
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0))
        errors.push_back("split.test_fraction: must lie strictly between 0 and 1");
    check(errors, "balance", [&] {
        if (c.targets.empty()) throw ValidationError("targets must not be empty");
        c.balance_plan().validate();
    });
    if (c.mtf_bins < 2 || c.mtf_bins > 32) errors.push_back("encode.mtf_bins: must be in [2, 32]");
    if (c.model != "gbdt" && c.model != "rf") errors.push_back("model: must be 'gbdt' or 'rf'");
    check(errors, "gbdt", [&] { c.gbdt.validate(); });
    check(errors, "rf", [&] { c.rf.validate(); });
    if (c.folds < 2) errors.push_back("gridsearch.folds: must be at least 2");
    if (c.gbdt_grid.learning_rate.empty() || c.gbdt_grid.max_depth.empty() || c.gbdt_grid.n_estimators.empty())
        errors.push_back("gridsearch.gbdt: every axis needs at least one value");
    if (c.rf_grid.n_trees.empty() || c.rf_grid.max_depth.empty())
        errors.push_back("gridsearch.rf: every axis needs at least one value");
    check(errors, "gridsearch", [&] {
        for (const auto& spec : model_grid(c)) std::visit([](const auto& p) { p.validate(); }, spec);
    });
    check(errors, "synth", [&] { c.synth.validate(); });
    return errors;
}

std::vector<ModelSpec> model_grid(const PipelineConfig& c) {
    std::vector<ModelSpec> grid;
    if (c.model == "rf") {
        for (std::size_t n : c.rf_grid.n_trees)
            for (std::size_t d : c.rf_grid.max_depth) {
                RfParams p = c.rf;
                p.n_trees = n;
                p.max_depth = d;
                p.seed = c.seed;
                grid.emplace_back(p);
            }
        return grid;
    }
    for (double lr : c.gbdt_grid.learning_rate)
        for (std::size_t d : c.gbdt_grid.max_depth)
            for (std::size_t n : c.gbdt_grid.n_estimators) {
                GbdtParams p = c.gbdt;
                p.learning_rate = lr;
                p.max_depth = d;
                p.n_estimators = n;
                p.seed = c.seed;
                grid.emplace_back(p);
            }
    return grid;
}

std::map<std::string, std::size_t> parse_targets(const std::string& text) {
    std::map<std::string, std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ValidationError("--targets: expected LABEL=COUNT, got '" + item + "'");
        const std::string count = item.substr(eq + 1);
        std::size_t n = 0;
        const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
        if (ec != std::errc{} || ptr != count.data() + count.size() || count.empty())
            throw ValidationError("--targets: bad count in '" + item + "'");
        if (!out.emplace(item.substr(0, eq), n).second)
            throw ValidationError("--targets: label '" + item.substr(0, eq) + "' given twice");
    }
    if (out.empty()) throw ValidationError("--targets: empty");
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const PipelineConfig& cfg) {
    json j = cfg.to_json();
    j.erase("workdir");  // where results land does not change what they are
    return fnv1a_hex(j.dump());
}

}  // namespace ecgbeat::cli

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "ecgbeat/errors.hpp"

using namespace ecgbeat;
using namespace ecgbeat::cli;
using nlohmann::json;

namespace {

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
    return std::any_of(errors.begin(), errors.end(),
                       [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("defaults validate cleanly") {
    CHECK(validate(PipelineConfig{}).empty());
}

TEST_CASE("example config file matches the defaults") {
    std::ifstream in(ECGBEAT_SOURCE_DIR "/configs/example.json");
    REQUIRE(in);
    PipelineConfig cfg;
    std::vector<std::string> errors;
    merge_json(cfg, json::parse(in, nullptr, true, true), errors);
    CHECK(errors.empty());
    CHECK(cfg.to_json() == PipelineConfig{}.to_json());
}

TEST_CASE("every problem is reported at once") {
    PipelineConfig cfg;
    std::vector<std::string> errors;
    merge_json(cfg,
               json{{"seed", -3},
                    {"typo", 1},
                    {"preprocess", {{"low_hz", "fast"}, {"bogus", true}}},
                    {"gbdt", {{"learning_rate", 0.0}}}},
               errors);
    CHECK(mentions(errors, "seed"));
    CHECK(mentions(errors, "typo: unknown key"));
    CHECK(mentions(errors, "preprocess.low_hz"));
    CHECK(mentions(errors, "preprocess.bogus"));

    cfg.preprocess.high_hz = 95.0;
    cfg.mtf_bins = 1;
    cfg.model = "xgb";
    cfg.test_fraction = 1.0;
    cfg.targets = {{"Q", 5}};
    const auto v = validate(cfg);
    CHECK(mentions(v, "high_hz"));
    CHECK(mentions(v, "mtf_bins"));
    CHECK(mentions(v, "model"));
    CHECK(mentions(v, "test_fraction"));
    CHECK(mentions(v, "unknown label 'Q'"));
    CHECK(mentions(v, "learning_rate"));
}

TEST_CASE("parse_targets") {
    const auto t = parse_targets("N=300000,S=100000,V=100000");
    CHECK(t.at("N") == 300000);
    CHECK(t.at("S") == 100000);
    CHECK(t.at("V") == 100000);
    CHECK_THROWS_AS(parse_targets("N=1,N=2"), ValidationError);
    CHECK_THROWS_AS(parse_targets("N=-1"), ValidationError);
    CHECK_THROWS_AS(parse_targets("N"), ValidationError);
    CHECK_THROWS_AS(parse_targets(""), ValidationError);
}

TEST_CASE("balance plan maps symbols to class ids") {
    PipelineConfig cfg;
    cfg.targets = {{"V", 7}, {"N", 9}};
    const auto plan = cfg.balance_plan();
    CHECK(plan.targets.at(0) == 9);
    CHECK(plan.targets.at(2) == 7);
    CHECK(plan.seed == cfg.seed);
}

TEST_CASE("config hash tracks content, not location") {
    PipelineConfig a, b;
    b.workdir = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.seed = 43;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("grid is the cross product of its axes") {
    PipelineConfig cfg;
    CHECK(model_grid(cfg).size() == 2 * 2 * 1);
    cfg.model = "rf";
    cfg.rf_grid.n_trees = {10, 20, 30};
    CHECK(model_grid(cfg).size() == 3 * 2);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dampnet/config.hpp"
#include "dampnet/errors.hpp"
#include "dampnet/output.hpp"
#include "scenarios.hpp"

using namespace dampnet;

#ifndef DAMPNET_SOURCE_DIR
#error "DAMPNET_SOURCE_DIR must be defined"
#endif

namespace {

const std::filesystem::path configs = std::filesystem::path(DAMPNET_SOURCE_DIR) / "configs";

Json paper_json() {
    std::ifstream in(configs / "paper_scenario.json");
    return Json::parse(in);
}

}  // namespace

TEST_CASE("bundled paper scenario") {
    const auto cfg = load_config(configs / "paper_scenario.json");
    CHECK(cfg.network.arcs().size() == 3);
    CHECK(cfg.network.arc(0).velocity == scenarios::sine(14, 1, 2));
    CHECK(cfg.network.arc(2).velocity == scenarios::sine(12, 1, 4));
    CHECK(cfg.network.arc(1).damping_factor == scenarios::sine(0.8, 0.2, 1));
    CHECK(cfg.demands[0] == scenarios::demand_v2());
    CHECK(cfg.demands[1] == scenarios::demand_v3());
    CHECK(cfg.T == 2.5);
    CHECK(cfg.monte_carlo_runs == 10000);
    CHECK(cfg.update_times == scenarios::seven_updates());
    CHECK(cfg.variants == reference_damping_variants());
}

TEST_CASE("parse, serialize, parse is the identity") {
    for (const char* name : {"paper_scenario.json", "closed_form_1_1.json"}) {
        const auto a = load_config(configs / name);
        const auto b = config_from_json(to_json(a));
        CHECK(to_json(a) == to_json(b));
        CHECK(a.network.nodes() == b.network.nodes());
        CHECK(a.network.arcs() == b.network.arcs());
        CHECK(a.demands == b.demands);
        CHECK(a.update_times == b.update_times);
        CHECK(a.variants == b.variants);
        CHECK(config_hash(a) == config_hash(b));
    }
}

TEST_CASE("time functions and damping shapes") {
    CHECK(time_function_from_json(Json(3.5)) == TimeFunction::constant(3.5));
    const auto f = time_function_from_json(Json::parse(R"({"constant": 1, "steps": [{"at": 1, "delta": 0.5}]})"));
    CHECK(f(2.0) == 1.5);
    CHECK(time_function_from_json(to_json(f)) == f);
    CHECK(damping_from_json(Json::parse(R"({"kind": "monomial", "degree": 3})")) == DampingShape::monomial(3));
    CHECK(damping_from_json(Json::parse(R"({"kind": "none"})")).is_none());
    CHECK_THROWS_AS(damping_from_json(Json::parse(R"({"kind": "monomial", "degree": 7})")), SchemaError);
    CHECK_THROWS_AS(damping_from_json(Json::parse(R"({"kind": "cubic"})")), SchemaError);
    CHECK_THROWS_AS(time_function_from_json(Json::parse(R"({"constant": 1, "extra": 2})")), SchemaError);
}

TEST_CASE("schema errors") {
    auto j = paper_json();
    j["numerics"]["colour"] = "red";
    CHECK_THROWS_AS(config_from_json(j), SchemaError);
    j = paper_json();
    j["demands"][0].erase("kappa");
    CHECK_THROWS_AS(config_from_json(j), SchemaError);
    j = paper_json();
    j["network"]["arcs"][0]["velocity"] = "fast";
    CHECK_THROWS_AS(config_from_json(j), SchemaError);
    j = paper_json();
    j["experiment"]["update_times"] = Json::array({0.0});
    CHECK_THROWS_AS(config_from_json(j), SchemaError);
    CHECK_THROWS_AS(load_config(configs / "does_not_exist.json"), IoError);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

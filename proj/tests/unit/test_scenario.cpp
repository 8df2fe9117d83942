#include "doctest.h"

#include "cvcc/scenario.hpp"
#include "test_util.hpp"

using namespace cvcc;
using namespace cvcc::sim;
using nlohmann::json;

#ifndef CVCC_SCENARIO_DIR
#define CVCC_SCENARIO_DIR "scenarios"
#endif

namespace {

json minimal() {
    return json::parse(R"({
      "group": "toy",
      "duration_s": 1.0,
      "nodes": [
        {"id": "car1", "role": "obu", "position": [0.0, 0.0]},
        {"id": "rsu1", "role": "rsu", "position": [10.0, 0.0]}
      ],
      "links": [{"from": "car1", "to": "rsu1", "kind": "dsrc"}],
      "workload": [{"node": "car1", "peer": "rsu1", "channel": "v2r"}]
    })");
}

} // namespace

TEST_CASE("bundled scenarios parse and validate") {
    for (const char* name :
         {"honest-v2r.json", "honest-all.json", "replay-attack.json", "tamper-attack.json",
          "impersonation-attack.json", "mitm-nonce-substitution.json", "cellular-demo.json"}) {
        CHECK_NOTHROW(load_config(std::string(CVCC_SCENARIO_DIR) + "/" + name));
    }
}

TEST_CASE("defaults applied") {
    ScenarioConfig cfg = parse_config(minimal());
    CHECK(cfg.delta_ms == 300);
    CHECK(cfg.workload[0].period_s == 1.0);
    CHECK(cfg.workload[0].count == 1);
}

TEST_CASE("unknown keys are parse errors") {
    json j = minimal();
    j["surprise"] = 1;
    CHECK_ERRC(parse_config(j), Errc::ParseError);

    j = minimal();
    j["nodes"][0]["speed"] = 12;
    CHECK_ERRC(parse_config(j), Errc::ParseError);

    j = minimal();
    j["workload"][0]["chanel"] = "v2r";
    CHECK_ERRC(parse_config(j), Errc::ParseError);
}

TEST_CASE("type errors are parse errors") {
    json j = minimal();
    j["duration_s"] = "ten";
    CHECK_ERRC(parse_config(j), Errc::ParseError);
    j = minimal();
    j["nodes"][0]["position"] = json::array({1.0});
    CHECK_ERRC(parse_config(j), Errc::ParseError);
}

TEST_CASE("validation failures name the offender") {
    json j = minimal();
    j["nodes"][1]["id"] = "car1"; // duplicate
    try {
        parse_config(j);
        FAIL("expected ValidationError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ValidationError);
        CHECK(std::string(e.what()).find("car1") != std::string::npos);
    }

    j = minimal();
    j["links"][0]["to"] = "ghost";
    CHECK_ERRC(parse_config(j), Errc::ValidationError);

    j = minimal();
    j["workload"][0]["channel"] = "v2v"; // rsu peer is not an obu
    CHECK_ERRC(parse_config(j), Errc::ValidationError);

    j = minimal();
    j["workload"][0]["keywords"] = json::array({"kw"}); // uploads need a cloud channel
    CHECK_ERRC(parse_config(j), Errc::ValidationError);

    j = minimal();
    j["duration_s"] = 0.0;
    CHECK_ERRC(parse_config(j), Errc::ValidationError);
}

TEST_CASE("adversary validation") {
    json j = minimal();
    j["adversary"] = {{"node", "eve"}, {"actions", json::array()}};
    CHECK_ERRC(parse_config(j), Errc::ValidationError); // unknown node

    j["nodes"].push_back({{"id", "eve"}, {"role", "adversary"}, {"position", {5.0, 0.0}}});
    CHECK_NOTHROW(parse_config(j));

    j["adversary"]["actions"].push_back(
        {{"type", "impersonate"}, {"channel", "v2r"}, {"target", "rsu1"}, {"at_s", 0.5}});
    CHECK_ERRC(parse_config(j), Errc::ValidationError); // no eve-rsu1 link

    j["links"].push_back({{"from", "eve"}, {"to", "rsu1"}, {"kind", "dsrc"}});
    CHECK_NOTHROW(parse_config(j));
}

TEST_CASE("cost model override") {
    json j = minimal();
    j["cost_model"] = {{"time_s", {{"hash", 5.0}}}};
    ScenarioConfig cfg = parse_config(j);
    REQUIRE(cfg.cost_model.has_value());
    CHECK(cfg.cost_model->op_time(metrics::OpKind::Hash) == 5.0);

    j["cost_model"] = {{"time_s", {{"frobnicate", 5.0}}}};
    CHECK_ERRC(parse_config(j), Errc::ParseError);
}

TEST_CASE("missing scenario file") {
    CHECK_ERRC(load_config("/nonexistent/path.json"), Errc::ParseError);
}

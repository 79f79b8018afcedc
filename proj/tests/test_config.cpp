#include <doctest.h>

#include "hubbard/config.hpp"

using namespace hubbard;
using nlohmann::json;

TEST_CASE("minimal config gets defaults") {
    const JobConfig c = parse_config_text(R"({"model":{"kind":"nearest"},"n":128})");
    CHECK(c.run.model.kind == DispersionKind::nearest);
    CHECK(c.run.n == 128);
    CHECK(c.run.epsilon == 0.02);
    CHECK(c.run.dt == 0.01);
    CHECK(c.run.observable_stride == 10);
    CHECK(c.run.snapshot_stride == 1000);
    CHECK_FALSE(c.run.reduced_mode);
    CHECK(c.initial.kind == "appendixA");
}

TEST_CASE("schema violations are rejected") {
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"exp","zeta":0.0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"exp"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nnn"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"},"colour":1})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest","eta":0.1,"foo":1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"},"dt":-1})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"},"n":"big"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"warp"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"n":64})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"},"initial":{"kind":"snapshot"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"},"analysis":{"window":[3,1]}})"), ConfigError);
}

TEST_CASE("overrides") {
    const JobConfig c = parse_config_text(R"({"model":{"kind":"nnn","eta":0.1}})",
                                          {"model.eta=0.5", "epsilon=0.1", "output_dir=runs/a", "reduced_mode=true"});
    CHECK(c.run.model.eta == 0.5);
    CHECK(c.run.epsilon == 0.1);
    CHECK(c.output_dir == "runs/a");
    CHECK(c.run.reduced_mode);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"}})", {"novalue"}), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"}})", {"model..kind=exp"}), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"}})", {"n.x=3"}), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"model":{"kind":"nearest"}})", {"typo=3"}), ConfigError);

    json doc = json::object();
    apply_override(doc, "a.b.c=[1,2]");
    CHECK(doc["a"]["b"]["c"] == json::array({1, 2}));
    apply_override(doc, "a.s=hello");
    CHECK(doc["a"]["s"] == "hello");
}

TEST_CASE("resolved config round trip") {
    for (const char* text : {R"({"model":{"kind":"nearest"}})", R"({"model":{"kind":"nnn","eta":0.005},"n":64})",
                             R"({"model":{"kind":"exp","zeta":0.4},"dt":0.02,"t_end":150})",
                             R"({"model":{"kind":"mth","m":2},"analysis":{"window":[1,2]},
                                 "sweep":{"key":"model.m","values":[2,3]}})"}) {
        const JobConfig c = parse_config_text(text);
        const json doc = config_to_json(c);
        const JobConfig again = config_from_json(doc);
        CHECK(config_to_json(again) == doc);
        CHECK(config_hash(again) == config_hash(c));
    }
    const JobConfig a = parse_config_text(R"({"model":{"kind":"nnn","eta":0.5}})");
    const JobConfig b = parse_config_text(R"({"model":{"kind":"nnn","eta":0.5}})", {"model.eta=0.25"});
    CHECK(config_hash(a) != config_hash(b));
    const JobConfig moved = parse_config_text(R"({"model":{"kind":"nnn","eta":0.5},"output_dir":"elsewhere"})");
    CHECK(config_hash(moved) == config_hash(a));
}

TEST_CASE("git blob hash") {
    // Values produced by `git hash-object`.
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

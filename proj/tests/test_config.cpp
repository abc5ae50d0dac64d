#include <doctest.h>

#include "config.hpp"
#include "report.hpp"

using rmt::Config;
using rmt::json;

TEST_CASE("toml subset: sections, scalars, arrays, comments") {
  const std::string text = R"(
# experiment setup
trials = 5000
seed = 42
eps_min = 1.0e-3
label = "goe baseline"   # inline comment
flag = true

[ensemble]
kind = "gaussian"

[grids.eps]
points = 25
values = [0.1, 0.2, 0.5]
)";
  const json j = rmt::parse_toml(text);
  CHECK(j.at("trials").get<std::int64_t>() == 5000);
  CHECK(j.at("seed").get<std::int64_t>() == 42);
  CHECK(j.at("eps_min").get<double>() == doctest::Approx(1e-3));
  CHECK(j.at("label").get<std::string>() == "goe baseline");
  CHECK(j.at("flag").get<bool>() == true);
  CHECK(j.at("ensemble").at("kind").get<std::string>() == "gaussian");
  CHECK(j.at("grids").at("eps").at("points").get<std::int64_t>() == 25);
  CHECK(j.at("grids").at("eps").at("values").size() == 3);
}

TEST_CASE("toml errors carry line information") {
  CHECK_THROWS_AS(rmt::parse_toml("key value\n"), rmt::ConfigError);
  CHECK_THROWS_AS(rmt::parse_toml("[unclosed\n"), rmt::ConfigError);
  CHECK_THROWS_AS(rmt::parse_toml("x = \"open\n"), rmt::ConfigError);
  CHECK_THROWS_AS(rmt::parse_toml("x = nonsense\n"), rmt::ConfigError);
}

TEST_CASE("json configs are accepted and sniffed") {
  const json a = rmt::parse_config_text(R"({"trials": 10})", "json");
  CHECK(a.at("trials") == 10);
  const json b = rmt::parse_config_text(R"(  {"n": 4} )", "auto");
  CHECK(b.at("n") == 4);
  const json c = rmt::parse_config_text("n = 4\n", "auto");
  CHECK(c.at("n") == 4);
  CHECK_THROWS_AS(rmt::parse_config_text("[1,2]", "json"), rmt::ConfigError);
}

TEST_CASE("layering: flag > file > default, objects merge deep") {
  const json defaults = {{"trials", 100}, {"ensemble", {{"kind", "rademacher"}}}};
  const json file = {{"trials", 500}, {"ensemble", {{"nu", 0.25}}}};
  const json flags = {{"trials", 900}};
  const Config cfg = Config::layered(defaults, file, flags);
  CHECK(cfg.integer("trials", 0) == 900);
  CHECK(cfg.sub("ensemble").at("kind") == "rademacher");
  CHECK(cfg.sub("ensemble").at("nu") == 0.25);
}

TEST_CASE("config hash is stable under round trip") {
  const json j = {{"trials", 500},
                  {"eps_min", 1e-3},
                  {"x", 0.1234567890123456789},
                  {"ensemble", {{"kind", "gaussian"}}}};
  const Config a(j);
  const json round = json::parse(a.raw().dump());
  const Config b(round);
  CHECK(a.hash() == b.hash());
  // Different content, different hash.
  json j2 = j;
  j2["trials"] = 501;
  CHECK(Config(j2).hash() != a.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("typed getters validate") {
  const Config cfg(json{{"a", "text"}, {"b", 1.5}, {"list", {1, 2}}});
  CHECK_THROWS_AS(cfg.num("a", 0.0), rmt::ConfigError);
  CHECK_THROWS_AS(cfg.integer("b", 0), rmt::ConfigError);
  CHECK_THROWS_AS(cfg.num_list("a"), rmt::ConfigError);
  CHECK(cfg.int_list("list").size() == 2);
  CHECK(cfg.num("missing", 7.0) == 7.0);
}

TEST_CASE("format_double round-trips doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, 2.0 / 64.0}) {
    const std::string s = rmt::format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("csv rendering: header row, LF endings, 17 digits") {
  const json t = rmt::make_table("demo", {"x", "name", "flag"},
                                 {{0.5, "a", true}, {1.0 / 3.0, "b", false}});
  const std::string csv = rmt::table_to_csv(t);
  CHECK(csv.substr(0, 12) == "x,name,flag\n");
  CHECK(csv.find("0.33333333333333331") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
}

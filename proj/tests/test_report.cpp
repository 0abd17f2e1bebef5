#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "polelab/report.hpp"

using namespace polelab;

namespace {

ExperimentConfig small_cone_config() {
  ExperimentConfig c;
  c.profile_spec = "builtin:cone_tanh[0.5]";
  c.r_max = 128.0;
  c.r_sequence = {10.0, 2.0, 4};  // 10, 20, 40, 80
  return c;
}

}  // namespace

TEST_CASE("config parsing and validation") {
  SECTION("defaults from a minimal document") {
    const auto c = config_from_json(ordered_json::parse(R"({"profile": "builtin:euclidean"})"));
    REQUIRE(c.profile_spec == "builtin:euclidean");
    REQUIRE(c.r_max == 1536.0);
    REQUIRE(c.r_sequence.count == 8);
    REQUIRE(c.eps == 0.2);
    REQUIRE_FALSE(c.riccati.has_value());
    REQUIRE(c.annulus_radii().size() == 8);  // 1.2 * 1280 <= 1536
  }

  SECTION("full document round trip") {
    const char* doc = R"({
      "profile": "builtin:cone_tanh[0.25]",
      "r_max": 640,
      "r_sequence": {"base": 5, "factor": 2, "count": 7},
      "eps": 0.1,
      "quad_rel_tol": 1e-9,
      "quad_abs_tol": 1e-11,
      "riccati": {"field": "constant:1", "h": 0.01, "t_max": 20, "n_directions": 4},
      "output": {"json": "out.json", "csv_dir": "csv"}
    })";
    const auto c = config_from_json(ordered_json::parse(doc));
    REQUIRE(c.riccati->field == "constant:1");
    REQUIRE(c.riccati->n_directions == 4);
    REQUIRE(c.output_json == "out.json");
    const auto back = config_from_json(config_to_json(c));
    REQUIRE(config_to_json(back) == config_to_json(c));
  }

  SECTION("invalid configs are rejected") {
    const auto parse = [](const char* doc) {
      return config_from_json(ordered_json::parse(doc));
    };
    REQUIRE_THROWS_AS(parse(R"({"profile": ""})"), config_error);
    REQUIRE_THROWS_AS(parse(R"({"profile": "t", "eps": 1.0})"), config_error);
    REQUIRE_THROWS_AS(parse(R"({"profile": "t", "quad_rel_tol": 0})"), config_error);
    REQUIRE_THROWS_AS(parse(R"({"profile": "t", "r_sequence": {"count": 3}})"), config_error);
    // sequence reaching past r_max
    REQUIRE_THROWS_AS(parse(R"({"profile": "t", "r_max": 100})"), config_error);
    // too few radii left for the annulus suite
    REQUIRE_THROWS_AS(parse(R"({"profile": "t", "r_max": 1290})"), config_error);
  }
}

TEST_CASE("run_experiment on euclidean space passes every suite") {
  ExperimentConfig c;
  c.profile_spec = "builtin:euclidean";
  const auto rep = run_experiment(c);
  REQUIRE(rep.validation_ok);
  REQUIRE(rep.all_verdicts_pass());
  REQUIRE(report_exit_code(rep) == 0);
  REQUIRE(rep.avr->value() == 1.0);
  REQUIRE(std::abs(rep.scalar_integral->report.limit) <= 1e-12);
  REQUIRE(rep.pinching->flat);
  REQUIRE(*rep.flat);
  REQUIRE_FALSE(rep.determinism_hash.empty());
}

TEST_CASE("run_experiment aborts with only the validation section on bad profiles") {
  ExperimentConfig c;
  c.profile_spec = "t + t^2";
  const auto rep = run_experiment(c);
  REQUIRE_FALSE(rep.validation_ok);
  REQUIRE_FALSE(rep.avr.has_value());
  REQUIRE_FALSE(rep.scalar_integral.has_value());
  REQUIRE(report_exit_code(rep) == 3);

  c.profile_spec = "t +";
  const auto parse_rep = run_experiment(c);
  REQUIRE_FALSE(parse_rep.validation_ok);
  REQUIRE(report_exit_code(parse_rep) == 3);
}

TEST_CASE("exit codes reflect the aggregate verdict") {
  ExperimentReport rep;
  rep.validation_ok = true;
  rep.verdicts = {{"a", true}, {"b", true}};
  REQUIRE(report_exit_code(rep) == 0);
  rep.verdicts[1].second = false;
  REQUIRE(report_exit_code(rep) == 2);
  rep.validation_ok = false;
  REQUIRE(report_exit_code(rep) == 3);
}

TEST_CASE("reports are deterministic and round-trip through JSON") {
  const ExperimentConfig c = small_cone_config();
  const auto rep1 = run_experiment(c);
  const auto rep2 = run_experiment(c);

  SECTION("byte-identical apart from timing") {
    REQUIRE(emit_report_json(rep1, false) == emit_report_json(rep2, false));
    REQUIRE(rep1.determinism_hash == rep2.determinism_hash);
    auto with1 = report_to_json(rep1);
    auto with2 = report_to_json(rep2);
    with1.erase("timing");
    with2.erase("timing");
    REQUIRE(with1.dump() == with2.dump());
  }

  SECTION("JSON parses back to an equal structure") {
    const auto j = report_to_json(rep1);
    const auto back = ordered_json::parse(j.dump(2));
    REQUIRE(back == j);
  }

  SECTION("verdicts hold at the reduced radius range too") {
    REQUIRE(rep1.all_verdicts_pass());
  }
}

TEST_CASE("CSV emission") {
  SECTION("euclidean scalar-integral rows are zero") {
    ExperimentConfig c;
    c.profile_spec = "builtin:euclidean";
    const auto rep = run_experiment(c);
    const auto files = emit_report_csv(rep);
    REQUIRE(files.count("scalar_integral.csv") == 1);
    std::istringstream in(files.at("scalar_integral.csv"));
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "r,value,fit_residual");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      REQUIRE(std::abs(std::stod(line.substr(c1 + 1, c2 - c1 - 1))) <= 1e-12);
    }
    REQUIRE(rows == 8);
  }

  SECTION("cone AVR final row is near 1/4") {
    ExperimentConfig c;
    c.profile_spec = "builtin:cone_tanh[0.5]";
    const auto rep = run_experiment(c);
    const auto files = emit_report_csv(rep);
    std::istringstream in(files.at("avr_sphere.csv"));
    std::string line, last;
    std::getline(in, line);
    while (std::getline(in, line))
      if (!line.empty()) last = line;
    const auto c1 = last.find(',');
    const auto c2 = last.find(',', c1 + 1);
    const double value = std::stod(last.substr(c1 + 1, c2 - c1 - 1));
    REQUIRE(std::abs(value - 0.25) <= 0.005 * 0.25);
  }
}

TEST_CASE("run_experiment with a riccati section") {
  ExperimentConfig c = small_cone_config();
  c.riccati = RiccatiConfig{"aniso:1,0.5", 1e-2, 30.0, 4};
  const auto rep = run_experiment(c);
  REQUIRE(rep.riccati.size() == 4);
  for (const auto& d : rep.riccati) {
    REQUIRE_FALSE(d.conjugate_point.has_value());
    REQUIRE(d.verdict);
  }
  REQUIRE(rep.all_verdicts_pass());

  // a field with a conjugate point is reported but does not fail the verdict
  c.riccati = RiccatiConfig{"constant:1", 1e-2, 10.0, 2};
  const auto conj = run_experiment(c);
  for (const auto& d : conj.riccati) {
    REQUIRE(d.conjugate_point.has_value());
    REQUIRE(std::abs(*d.conjugate_point - pi) <= 1e-4);
    REQUIRE(d.verdict);
  }
}

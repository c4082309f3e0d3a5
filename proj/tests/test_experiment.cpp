#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>

#include <json.hpp>

#include "difflab/acceptance.hpp"
#include "difflab/config.hpp"
#include "difflab/errors.hpp"
#include "difflab/experiment.hpp"

using namespace difflab;
namespace fs = std::filesystem;

namespace {

std::string data_file(const char* name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

std::string config_error_text(const std::string& json_text) {
  try {
    parse_config_text(json_text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("experiment kind names round trip") {
  for (const char* name : {"solve", "varadhan", "pressure", "barrier",
                           "symmetry", "manifold", "acceptance"}) {
    CHECK(to_string(experiment_kind_from_string(name)) == name);
  }
  CHECK_THROWS_AS(experiment_kind_from_string("zebra"), ConfigError);
}

TEST_CASE("config parsing reads every section") {
  const ExperimentConfig cfg =
      parse_config_file(data_file("halfline_varadhan.json"));
  CHECK(cfg.kind == ExperimentKind::varadhan);
  CHECK(cfg.nonlinearity == "linear");
  CHECK(cfg.numerics.options.representation == Representation::logarithmic);
  CHECK(cfg.numerics.options.stepping.policy == TimeStepPolicy::proportional);
  CHECK(cfg.numerics.options.stepping.rho == doctest::Approx(2e-3));
  CHECK(cfg.numerics.mesh.r_hi == doctest::Approx(6.0));
  CHECK(cfg.numerics.mesh.attractors == std::vector<double>{0.0});
  CHECK(cfg.numerics.times == std::vector<double>{1e-3, 1e-2});
  CHECK(cfg.numerics.k_lo == doctest::Approx(0.5));
  CHECK(cfg.numerics.k_hi == doctest::Approx(2.0));
  CHECK(!cfg.domain.has_value());
  CHECK(cfg.seed == 1);

  const ExperimentConfig ell =
      parse_config_file(data_file("ellipse_symmetry.json"));
  CHECK(ell.kind == ExperimentKind::symmetry);
  REQUIRE(ell.domain.has_value());
  CHECK(ell.domain->kind == DomainKind::exterior);
  REQUIRE(ell.domain->primitives.size() == 1);
  CHECK(std::holds_alternative<Ellipse>(ell.domain->primitives[0]));
  CHECK(ell.domain->bbox.valid());
  CHECK(ell.numerics.mesh.h == doctest::Approx(0.05));
  CHECK(ell.numerics.surface_samples == 24);
}

TEST_CASE("canonical serialization round trips") {
  const ExperimentConfig cfg =
      parse_config_file(data_file("ellipse_symmetry.json"));
  const std::string once = resolved_config_json(cfg);
  const ExperimentConfig reparsed = parse_config_text(once);
  CHECK(resolved_config_json(reparsed) == once);
}

TEST_CASE("parse errors name the offending field") {
  CHECK(config_error_text(R"({"schema_version":1,"kind":"solve",
        "numerics":{"mesh":{"h":-0.1}}})")
            .find("numerics.mesh.h") != std::string::npos);
  CHECK(config_error_text(R"({"schema_version":1,"kind":"solve","bogus":1})")
            .find("bogus") != std::string::npos);
  CHECK(config_error_text(R"({"schema_version":1,"kind":"zebra"})")
            .find("kind") != std::string::npos);
  CHECK(config_error_text(R"({"schema_version":2,"kind":"solve"})")
            .find("schema_version") != std::string::npos);
  CHECK(config_error_text(R"({"schema_version":1,"kind":"solve",
        "numerics":{"times":[1e-2,1e-3]}})")
            .find("numerics.times") != std::string::npos);
  CHECK(config_error_text(R"({"schema_version":1,"kind":"pressure",
        "numerics":{"epsilons":[1e-3,1e-2]}})")
            .find("numerics.epsilons") != std::string::npos);
  CHECK(config_error_text(R"({"schema_version":1,"kind":"solve",
        "domain":{"kind":"everywhere","dimension":2,"primitives":[]}})")
            .find("domain.kind") != std::string::npos);
  CHECK(config_error_text("{ not json") != "");
  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("symmetry experiment reports the shape verdict") {
  ExperimentConfig cfg = parse_config_file(data_file("ellipse_symmetry.json"));
  cfg.out_dir = "test_out/ellipse_a";
  const RunOutcome a = run_experiment(cfg);
  CHECK(a.pass);
  CHECK(a.summary.find("sphere_consistent = false") != std::string::npos);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "report.json"));

  const auto report = nlohmann::ordered_json::parse(a.report_json);
  CHECK(report.at("schema_version") == 1);
  CHECK(report.at("kind") == "symmetry");
  CHECK(report.at("pass") == true);
  CHECK(report.at("symmetry").at("sphere_consistent") == false);
  CHECK(report.at("config") ==
        nlohmann::ordered_json::parse(resolved_config_json(cfg)));

  const RunOutcome b = run_experiment(cfg);
  CHECK(b.report_json == a.report_json);  // reruns reproduce byte for byte
}

TEST_CASE("transform-limit experiment passes on the half-line") {
  ExperimentConfig cfg =
      parse_config_file(data_file("halfline_varadhan.json"));
  cfg.out_dir = "test_out/varadhan";
  const RunOutcome out = run_experiment(cfg);
  CHECK(out.pass);

  const auto report = nlohmann::ordered_json::parse(out.report_json);
  CHECK(report.at("kind") == "varadhan");
  CHECK(report.at("varadhan").at("errors_decreasing") == true);
  CHECK(report.at("varadhan").at("final_error").get<double>() <= 0.05);
  CHECK(report.at("varadhan").at("sup_errors").size() == 2);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "sup_errors.csv"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "report.json"));
}

TEST_CASE("radial setup needs a centered domain") {
  ExperimentConfig cfg =
      parse_config_file(data_file("halfline_varadhan.json"));
  DomainSpec off;
  off.kind = DomainKind::exterior;
  off.dimension = 2;
  off.primitives.push_back(Ball{{0.5, 0.0, 0.0}, 1.0});
  cfg.domain = off;  // off-center and no bbox: neither run setup fits
  cfg.out_dir = "test_out/offcenter";
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("table regeneration rejects unknown suites") {
  CHECK_THROWS_AS(regenerate_tables("bogus", "test_out/tables"), ConfigError);
}

TEST_CASE("criterion rows serialize to a fixed table layout") {
  CriterionResult r;
  r.index = 3;
  r.name = "sample_row";
  r.measured = 0.123456789;
  r.threshold = 1.0;
  r.comparator = "<=";
  r.pass = true;
  const std::string csv = criteria_csv({r});
  CHECK(csv ==
        "index,name,measured,threshold,comparator,pass\n"
        "3,sample_row,0.123456789,1,<=,pass\n");
}

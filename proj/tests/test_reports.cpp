#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <json.hpp>
#include <string>

#include "steinlab/checks.hpp"
#include "steinlab/corpus.hpp"
#include "steinlab/errors.hpp"
#include "steinlab/io.hpp"
#include "steinlab/report_format.hpp"

using namespace steinlab;

namespace {

const CheckRow& row_of(const VerificationReport& r, const std::string& id) {
  for (const auto& row : r.rows)
    if (row.id == id) return row;
  FAIL("missing row " << id);
  return r.rows.front();
}

std::string spec_path(const std::string& name) { return std::string(STEINLAB_SPEC_DIR) + "/" + name; }

const char* kFlip = R"({"label": "flip", "algebra": {"multimatrix": {"blocks": [[1, 0.5], [1, 0.5]]}},
                       "group": "Z/2", "action": "flip", "checks": ["schreier_dim_der"]})";

}  // namespace

TEST_CASE("C[Z/2] group-algebra dimension row passes with value 1/2") {
  ExperimentSpec s = parse_spec(R"({"algebra": {"group_algebra": "Z/2"}, "checks": ["lemma_group_algebra_dim"]})");
  const VerificationReport r = run(s);
  const CheckRow& row = row_of(r, "lemma_group_algebra_dim");
  CHECK(row.status == "pass");
  CHECK(row.lhs == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(row.lhs_exact == "1/2");
  CHECK(r.all_pass());
}

TEST_CASE("(C^2, Z/2 flip): Schreier row has lhs 3/4 and rhs 1 + (1/2)(1/2 - 1)") {
  const VerificationReport r = run(parse_spec(kFlip));
  const CheckRow& row = row_of(r, "schreier_dim_der");
  CHECK(row.status == "pass");
  CHECK(row.lhs == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(row.rhs == doctest::Approx(1.0 + 0.5 * (0.5 - 1.0)).epsilon(1e-10));
  CHECK_FALSE(row.anchor.empty());
}

TEST_CASE("spec errors carry a location") {
  try {
    load_spec(spec_path("bad_action.json"));
    FAIL("expected SpecInvalid");
  } catch (const SpecInvalid& e) {
    CHECK(std::string(e.what()).find("action.matrices[1]") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_spec(R"({"group": "Z/2"})"), SpecInvalid);
  CHECK_THROWS_AS(parse_spec(R"({"algebra": {"multimatrix": {"blocks": [[1, 1]]}}, "checks": ["nope"]})"), SpecInvalid);
  CHECK_THROWS_AS(parse_spec(R"({"algebra": {"multimatrix": {"blocks": [[1, 0.5], [1, 0.5]]}},
                                 "group": "Z/4", "action": "flip", "subgroup": [0, 1]})"),
                  SpecInvalid);
  CHECK_THROWS_AS(parse_spec("{not json"), SpecInvalid);
  CHECK_THROWS_AS(parse_spec(R"({"algebra": {"multimatrix": {"blocks": [[1, 0.5], [1, 0.4]]}}})"), SpecInvalid);
  CHECK_THROWS_AS(parse_spec(R"({"algebra": {"group_algebra": "S_3"}, "group": "S_3", "action": "fourier"})"),
                  SpecInvalid);
}

TEST_CASE("an invalid algebra short-circuits to skipped rows, never pass") {
  const char* text = R"({"algebra": {"dim": 1, "mult": [[[1]]], "star": [[1]], "unit": [1], "trace": [2]},
                         "group": "Z/2", "action": "trivial"})";
  const VerificationReport r = run(parse_spec(text));
  CHECK(row_of(r, "validate_algebra").status == "fail");
  for (const auto& row : r.rows)
    if (row.id != "validate_algebra") CHECK_MESSAGE(row.status == "skipped", row.id);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("a non-homomorphic action fails its row and skips the action-dependent ones") {
  const char* text = R"({"algebra": {"multimatrix": {"blocks": [[1, 0.5], [1, 0.5]]}}, "group": "Z/2",
                         "action": {"matrices": [[[1, 0], [0, 1]], [[2, 0], [0, 2]]]},
                         "checks": ["multimatrix_dim", "schreier_dim_der"]})";
  const VerificationReport r = run(parse_spec(text));
  CHECK(row_of(r, "validate_action").status == "fail");
  CHECK(row_of(r, "schreier_dim_der").status == "skipped");
  CHECK(row_of(r, "multimatrix_dim").status == "pass");
}

TEST_CASE("non-abelian groups skip the character-based rows") {
  const VerificationReport r = run(parse_spec(R"({"algebra": {"multimatrix": {"blocks": [[1, 1]]}},
      "group": "S_3", "action": "trivial", "checks": ["vg_unitary", "scaled_generating_set"]})"));
  CHECK(row_of(r, "vg_unitary").status == "skipped");
  CHECK(row_of(r, "scaled_generating_set").status == "skipped");
}

TEST_CASE("check selection expands aliases and keeps dependency order") {
  const auto all = resolve_checks({"all"});
  CHECK(all.size() == check_registry().size());
  const auto ids = resolve_checks({"vg_average", "validate_algebra", "schreier_dim_der"});
  REQUIRE(ids.size() == 3);
  CHECK(ids[0] == "validate_algebra");
  CHECK(ids[1] == "schreier_dim_der");
  CHECK(ids[2] == "vg_average");
  for (const auto& id : resolve_checks({"identities"})) {
    bool stage4 = false;
    for (const auto& info : check_registry())
      if (info.id == id) stage4 = info.stage == 4;
    CHECK(stage4);
  }
  CHECK_THROWS_AS(resolve_checks({"lemma_9_9"}), SpecInvalid);
}

TEST_CASE("tolerance precedence: override, spec, environment, default") {
  ExperimentSpec s = parse_spec(kFlip);
  unsetenv("STEINLAB_TOL");
  CHECK(effective_tolerance(s) == 1e-8);
  setenv("STEINLAB_TOL", "1e-6", 1);
  CHECK(effective_tolerance(s) == 1e-6);
  s.tolerance = 1e-7;
  CHECK(effective_tolerance(s) == 1e-7);
  CHECK(effective_tolerance(s, 1e-5) == 1e-5);
  setenv("STEINLAB_TOL", "abc", 1);
  s.tolerance.reset();
  CHECK_THROWS_AS(effective_tolerance(s), SpecInvalid);
  unsetenv("STEINLAB_TOL");
}

TEST_CASE("report formats") {
  VerificationReport r;
  r.label = "a, \"quoted\" label";
  CheckRow ok;
  ok.id = "x";
  ok.anchor = "a | b";
  ok.status = "pass";
  ok.lhs = 0.75;
  ok.rhs = 0.75;
  ok.lhs_exact = ok.rhs_exact = "3/4";
  CheckRow bad = ok;
  bad.id = "y";
  bad.status = "fail";
  bad.residual = std::numeric_limits<double>::infinity();
  r.rows = {ok, bad};

  const auto j = nlohmann::json::parse(format_reports({r}, ReportFormat::json));
  CHECK(j["experiments"][0]["rows"][1]["residual"].is_null());
  CHECK(j["experiments"][0]["pass"] == false);
  CHECK(j["summary"]["pass"] == 1);
  CHECK(j["summary"]["fail"] == 1);
  CHECK_FALSE(j["experiments"][0]["rows"][0].contains("elapsed_s"));
  FormatOptions timed;
  timed.timings = true;
  CHECK(nlohmann::json::parse(format_reports({r}, ReportFormat::json, timed))["experiments"][0]["rows"][0].contains(
      "elapsed_s"));

  const std::string csv = format_reports({r}, ReportFormat::csv);
  CHECK(csv.find("\"a, \"\"quoted\"\" label\"") != std::string::npos);
  const std::string md = format_reports({r}, ReportFormat::markdown);
  CHECK(md.find("a \\| b") != std::string::npos);
  CHECK(md.find("1 passed, 1 failed, 0 skipped") != std::string::npos);
  CHECK(parse_format("md") == ReportFormat::markdown);
  CHECK_THROWS_AS(parse_format("xml"), SpecInvalid);
}

TEST_CASE("runs are reproducible under a fixed seed") {
  ExperimentSpec s = load_spec(spec_path("m2_ad.json"));
  const std::string a = format_reports({run(s, std::nullopt, 7)}, ReportFormat::json);
  const std::string b = format_reports({run(s, std::nullopt, 7)}, ReportFormat::json);
  CHECK(a == b);
}

TEST_CASE("algebra files: shorthand and explicit forms round-trip") {
  const LoadedAlgebra m2 = load_algebra(spec_path("m2_algebra.json"));
  CHECK(m2.algebra->dim == 4);
  REQUIRE(m2.blocks);
  const LoadedAlgebra cz2 = load_algebra(spec_path("cz2_explicit.json"));
  CHECK(validate(*cz2.algebra).pass);
  const LoadedAlgebra again = parse_algebra(algebra_to_json(*m2.algebra));
  CHECK(again.algebra->dim == 4);
  CHECK(validate(*again.algebra).pass);
  CHECK(max_abs(Mat(gram(*again.algebra) - gram(*m2.algebra))) < 1e-15);
}

TEST_CASE("built-in corpus covers the required algebras and actions") {
  const auto corpus = builtin_corpus();
  CHECK(corpus.size() >= 20);
  bool s3 = false, v4 = false, uneven = false, fourier = false;
  for (const auto& s : corpus) {
    if (s.label.find("S_3") != std::string::npos) s3 = true;
    if (s.label.find("Z/2xZ/2") != std::string::npos) v4 = true;
    if (s.label.find("uneven") != std::string::npos) uneven = true;
    if (s.label.find("Fourier") != std::string::npos) fourier = true;
    CHECK_NOTHROW(check_spec(s));
  }
  CHECK((s3 && v4 && uneven && fourier));
}

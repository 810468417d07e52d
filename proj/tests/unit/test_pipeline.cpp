#include <cmath>
#include <map>

#include "doctest.h"
#include "halftsp/error.hpp"
#include "halftsp/oracle.hpp"
#include "halftsp/pipeline.hpp"
#include "halftsp/verify.hpp"
#include "json.hpp"

using namespace halftsp;

namespace {

RunConfig config_for(const std::string& gen, long samples, int jobs = 1) {
  RunConfig c;
  c.generator = gen;
  c.samples = samples;
  c.seed = 7;
  c.jobs = jobs;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_THROWS_AS(c.validate(), Error);  // no source
  c.generator = "envelope:3";
  CHECK_NOTHROW(c.validate());
  c.instance_path = "x.json";
  CHECK_THROWS_AS(c.validate(), Error);  // two sources
  c.instance_path.clear();
  c.samples = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(parse_number_mode("float") == NumberMode::Float);
  CHECK_THROWS_AS(parse_number_mode("double"), Error);
}

TEST_CASE("mean and confidence interval") {
  const auto s = mean_stat({1, 2, 3, 4});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3)));
  CHECK(s.ci_low < s.mean);
  CHECK(s.ci_high > s.mean);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  const auto inst = generate_instance("cycle_chain", 4, 0);
  const auto a = report_json(run_ojoin(inst, config_for("cycle_chain:4", 300, 1)));
  const auto b = report_json(run_ojoin(inst, config_for("cycle_chain:4", 300, 1)));
  const auto c = report_json(run_ojoin(inst, config_for("cycle_chain:4", 300, 4)));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("single-sample run on K5 gives a feasible y") {
  const auto r = run_ojoin(generate_instance("k5_degree", 5, 0), config_for("k5_degree:5", 1));
  REQUIRE(r.samples.size() == 1);
  CHECK(r.samples[0].feasible);
  CHECK(r.infeasible == 0);
  CHECK(r.samples[0].min_y >= 1.0 / 6 - 1e-12);
}

TEST_CASE("report JSON has sorted keys and the CSV has one line per sample") {
  const auto r = run_ojoin(generate_instance("envelope", 3, 0), config_for("envelope:3", 20));
  const auto text = report_json(r);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.dump(2) + "\n" == text);
  CHECK(j["samples"].size() == 20);
  CHECK(j["config"]["seed"] == 7);
  CHECK(j.contains("version"));
  const auto csv = report_csv(r.samples);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}

TEST_CASE("Monte Carlo cut loads agree with the exact oracle") {
  const auto inst = generate_instance("cycle_chain", 3, 0);
  const auto r = run_ojoin(inst, config_for("cycle_chain:3", 4000, 4));
  const auto exact = exact_pipeline_expectations(prepare_instance(inst), ChargingParams{});
  std::map<VertexSet, double> want;
  for (const auto& c : exact.cuts) want[c.side] = to_double(c.expected);
  REQUIRE(!r.cuts.empty());
  for (const auto& c : r.cuts) {
    CAPTURE(c.side.size());
    REQUIRE(want.count(c.side));
    CHECK(std::fabs(c.load.mean - want[c.side]) <= 3 * c.load.stderr_ + 1e-12);
  }
}

TEST_CASE("float mode agrees with rational mode in distribution") {
  const auto inst = generate_instance("envelope", 3, 0);
  auto cfg = config_for("envelope:3", 500);
  const auto exact = run_ojoin(inst, cfg);
  cfg.mode = NumberMode::Float;
  const auto fl = run_ojoin(inst, cfg);
  CHECK(std::fabs(exact.ratio.mean - fl.ratio.mean) <= 1e-9);
  CHECK(fl.infeasible == 0);
}

TEST_CASE("degree-cut runs") {
  const auto inst = generate_instance("k5_degree", 7, 0);
  const auto a = run_degreecut(inst, config_for("k5_degree:7", 300, 2));
  const auto b = run_degreecut(inst, config_for("k5_degree:7", 300, 2));
  CHECK(report_json(a) == report_json(b));
  CHECK(a.infeasible == 0);
  for (int v = 0; v < a.n; ++v) CHECK(a.vertex_load_exact[v] <= to_double(a.vertex_bound) + 1e-12);
  CHECK_THROWS_AS(run_degreecut(generate_instance("cycle_chain", 2, 0), config_for("cycle_chain:2", 10)), Error);
}

TEST_CASE("verification battery on one instance") {
  VerifyOptions opts;
  opts.instances = {generate_instance("cycle_chain", 2, 0)};
  opts.degree_sizes.clear();
  opts.fixed_values = false;
  const auto ok = verify_lemmas(opts);
  CHECK(ok.passed());
  CHECK_FALSE(ok.summary.empty());

  opts.params.tau = Rational(1, 6);
  const auto bad = verify_lemmas(opts);
  CHECK_FALSE(bad.passed());
  bool feasibility_failed = false;
  for (const auto& s : bad.summary)
    if (s.lemma == "feasibility" && s.failures > 0) feasibility_failed = true;
  CHECK(feasibility_failed);
}

TEST_CASE("alpha = 0 leaves all-top cuts at load 1") {
  VerifyOptions opts;
  opts.instances = {generate_instance("nested_degree", 0, 0)};
  opts.degree_sizes.clear();
  opts.fixed_values = false;
  opts.params.alpha = 0;
  const auto r = verify_lemmas(opts);
  long checks = 0;
  for (const auto& c : r.checks)
    if (c.lemma == "alpha0_top_cut_load") {
      CHECK(c.value == 1);
      ++checks;
    }
  CHECK(checks > 0);
}

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "lpp/errors.hpp"
#include "lpp/experiments.hpp"

using namespace lpp;
namespace fs = std::filesystem;

namespace {

// Small instance of every preset, cheap enough for a unit test.
ExperimentConfig small(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.seed = 11;
  c.replicates = 6;
  switch (parse_experiment(name)) {
    case ExperimentKind::kTwScaling:
    case ExperimentKind::kTfExponent:
      c.n = 48;
      break;
    case ExperimentKind::kLocalTfTail:
      c.n = 128;
      c.ell = 16;
      break;
    case ExperimentKind::kFiniteCoalescence:
      c.k = 4;
      c.n = 64;
      c.r_list = {1, 2, 4};
      break;
    case ExperimentKind::kSemiInfiniteTail:
      c.k = 4;
      c.r_list = {1, 2};
      c.scheme.max_doublings = 3;
      break;
    case ExperimentKind::kBoundaryDensity:
      c.k = 4;
      c.scheme.max_doublings = 3;
      break;
    case ExperimentKind::kBarrierEvents:
      c.z = 8;
      c.u0 = 0.5;
      c.v0 = 0.5;
      c.replicates = 3;
      break;
    case ExperimentKind::kCoalRM:
      c.r = 4;
      c.big_m = 4;
      break;
  }
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<std::string> fa, fb;
  for (const auto& e : fs::directory_iterator(a)) fa.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) fb.push_back(e.path().filename().string());
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  for (const auto& f : fa) {
    if (slurp(a / f) != slurp(b / f)) return false;
  }
  return true;
}

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("lpp_test_experiments_" + tag);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("experiment names round trip") {
  CHECK(experiment_names().size() == 8);
  for (const auto& n : experiment_names()) CHECK(experiment_name(parse_experiment(n)) == n);
  CHECK_THROWS_AS(parse_experiment("nope"), ParameterError);
}

TEST_CASE("config json round trip and rejection") {
  ExperimentConfig c = small("finite-coalescence");
  c.precision = Precision::kSingle;
  c.s_list = {0.5, 1.0};
  c.threads = 7;
  const Json j = config_to_json(c);
  CHECK_FALSE(j.contains("threads"));
  ExperimentConfig back;
  config_from_json(j, back);
  CHECK(config_to_json(back) == j);
  CHECK(back.threads == 1);

  ExperimentConfig x;
  CHECK_THROWS_AS(config_from_json(Json{{"bogus", 1}}, x), ParameterError);
  CHECK_THROWS_AS(config_from_json(Json{{"k", "text"}}, x), ParameterError);
  CHECK_THROWS_AS(config_from_json(Json{{"scheme", Json{{"nope", 1}}}}, x), ParameterError);
  config_from_json(Json{{"threads", 3}, {"k", 9}}, x);
  CHECK(x.threads == 3);
  CHECK(x.k == 9);
}

TEST_CASE("validation names the offending value") {
  ExperimentConfig c;
  c.name = "tw-scaling";
  try {
    c.validate();
    FAIL("expected a ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("--n") != std::string::npos);
  }
  c.n = 64;
  c.validate();
  c.replicates = 0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c.replicates = 1;
  c.r_list = {4, 2};
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c.r_list = {};

  ExperimentConfig l;
  l.name = "local-tf-tail";
  l.n = 100;
  l.ell = 100;
  CHECK_THROWS_AS(l.validate(), ParameterError);

  ExperimentConfig b;
  b.name = "barrier-events";
  b.z = 8;  // u0 = 1 exceeds ln ln 8
  CHECK_THROWS_AS(b.validate(), ParameterError);

  ExperimentConfig m;
  m.name = "coal-rM";
  m.big_m = 2.5;
  CHECK_THROWS_AS(m.validate(), ParameterError);
}

TEST_CASE("defaults per experiment") {
  ExperimentConfig c;
  c.name = "finite-coalescence";
  c.k = 32;
  CHECK(effective_thresholds(c) == std::vector<double>{2, 4, 8, 16});
  CHECK(effective_n(c) == 64 * 16 * 32);
  c.name = "local-tf-tail";
  CHECK(effective_n(c) == 8192);
  c.name = "semi-infinite-tail";
  CHECK(effective_thresholds(c) == std::vector<double>{1, 2, 4, 8, 16});
  c.name = "tf-exponent";
  CHECK_THROWS_AS(effective_n(c), ParameterError);
}

TEST_CASE("one replicate gives one record with its field key") {
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    ExperimentConfig c = small(name);
    c.replicates = 1;
    const ExperimentResult r = run_experiment(c);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0]["seed"] == c.seed);
    CHECK(r.records[0]["replicate"] == 0);
    CHECK(r.fit["replicates"] == 1);
  }
}

TEST_CASE("records are a pure function of (seed, cfg, replicate)") {
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    const ExperimentConfig c = small(name);
    const ExperimentResult r = run_experiment(c);
    REQUIRE(r.records.size() == c.replicates);
    for (std::uint64_t i = 0; i < c.replicates; ++i) {
      CHECK(r.records[i]["replicate"] == i);
      CHECK(run_replicate(c, i) == r.records[i]);
    }
    ExperimentConfig other = c;
    other.seed = c.seed + 1;
    bool differs = false;
    for (std::uint64_t i = 0; i < c.replicates; ++i) differs |= run_replicate(other, i) != r.records[i];
    if (parse_experiment(name) != ExperimentKind::kCoalRM && parse_experiment(name) != ExperimentKind::kBoundaryDensity) {
      CHECK(differs);
    }
  }
}

TEST_CASE("result directories do not depend on the thread count") {
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    ExperimentConfig c = small(name);
    const fs::path a = scratch(name + "_1");
    const fs::path b = scratch(name + "_8");
    c.threads = 1;
    write_results(a, run_experiment(c));
    c.threads = 8;
    write_results(b, run_experiment(c));
    CHECK(same_tree(a, b));
    CHECK(fs::exists(a / "cfg.json"));
    CHECK(fs::exists(a / "records.jsonl"));
    CHECK(fs::exists(a / "fit.json"));
    CHECK((fs::exists(a / "tails.csv") || fs::exists(a / "events.csv")));
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("summaries recompute from a results directory") {
  const ExperimentConfig c = small("tw-scaling");
  const ExperimentResult r = run_experiment(c);
  const fs::path d = scratch("fit");
  write_results(d, r, RecordFormat::kCsv);
  CHECK(fs::exists(d / "records.csv"));
  const ExperimentResult back = load_and_summarize(d);
  CHECK(back.records == r.records);
  CHECK(back.fit == r.fit);
  CHECK(back.config == r.config);
  REQUIRE(back.tails.has_value());
  CHECK(back.tails->rows.size() == r.tails->rows.size());
  fs::remove_all(d);
}

TEST_CASE("aggregation counts every replicate once") {
  const ExperimentConfig c = small("finite-coalescence");
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.tails.has_value());
  for (const TailRow& row : r.tails->rows) CHECK(row.trials == c.replicates);
  for (std::size_t i = 1; i < r.tails->rows.size(); ++i) CHECK(r.tails->rows[i].p <= r.tails->rows[i - 1].p);

  const ExperimentResult e = run_experiment(small("coal-rM"));
  REQUIRE(e.events.size() == 1);
  CHECK(e.events[0].trials == 6);
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  std::vector<int> hit(100, 0);
  parallel_for(100, 8, [&](std::uint64_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  try {
    parallel_for(50, 4, [](std::uint64_t i) {
      if (i % 7 == 3) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "3");
  }
}

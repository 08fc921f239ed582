#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "lpp/field.hpp"
#include "lpp/io.hpp"
#include "lpp/path.hpp"

using namespace lpp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run lppgeo(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  Run r;
  r.code = cli::run(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("lpp_test_cli_" + tag);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("geodesic output recomputes from the field") {
  const Run r = lppgeo({"geodesic", "--from", "0,0", "--to", "64,64", "--seed", "7"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  const WeightField f = WeightField::unbounded(FieldKey{7, 0});
  const Vertex start{j["path"]["start"][0], j["path"]["start"][1]};
  const auto v = decode_steps(start, j["path"]["steps"].get<std::string>());
  REQUIRE(v.size() == 129);
  CHECK(v.front() == Vertex{0, 0});
  CHECK(v.back() == Vertex{64, 64});
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) w += f.weight_at(v[i]);  // last vertex excluded
  CHECK(w == doctest::Approx(j["path"]["weight"].get<double>()).epsilon(1e-12));
  CHECK(j["time"] == j["path"]["weight"]);
}

TEST_CASE("usage errors exit 2") {
  Run r = lppgeo({"experiment", "run", "tw-scaling", "--replicates", "2", "--out", scratch("n").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("--n") != std::string::npos);

  r = lppgeo({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);

  r = lppgeo({"geodesic", "--from", "0,0", "--to", "3,3", "--bogus"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--from") != std::string::npos);

  r = lppgeo({"geodesic", "--from", "0,0", "--to", "3"});
  CHECK(r.code == 2);
  r = lppgeo({"geodesic", "--from", "5,5", "--to", "3,3"});
  CHECK(r.code == 2);
  r = lppgeo({"experiment", "run", "tw-scaling", "--n", "1", "--out", scratch("n1").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("--n") != std::string::npos);
  r = lppgeo({"experiment", "run", "tw-scaling", "--n", "16", "--precision", "half", "--out", "x"});
  CHECK(r.code == 2);
}

TEST_CASE("capacity errors exit 3") {
  const Run r = lppgeo({"field", "dump", "--rect", "0,100000,0,100000"});
  CHECK(r.code == 3);
}

TEST_CASE("experiment run is deterministic and fit recomputes") {
  const fs::path a = scratch("a");
  const fs::path b = scratch("b");
  const std::vector<std::string> base{"experiment", "run", "tw-scaling", "--n", "256", "--replicates", "8",
                                      "--seed", "1", "--out"};
  auto args = base;
  args.push_back(a.string());
  REQUIRE(lppgeo(args).code == 0);
  args.back() = b.string();
  args.insert(args.end(), {"--threads", "8"});
  REQUIRE(lppgeo(args).code == 0);
  for (const char* f : {"cfg.json", "records.jsonl", "tails.csv", "fit.json", "plot.dat"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const std::string fit_before = slurp(a / "fit.json");
  const Run again = lppgeo({"experiment", "fit", "--out", a.string()});
  CHECK((again.code == 0 || again.code == 4));
  CHECK(slurp(a / "fit.json") == fit_before);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("fit reports insufficient data with exit 4") {
  const fs::path d = scratch("insufficient");
  REQUIRE(lppgeo({"experiment", "run", "coal-rM", "--r", "4", "--big-m", "4", "--replicates", "2", "--out",
                  d.string()})
              .code == 0);
  CHECK(lppgeo({"experiment", "fit", "--out", d.string()}).code == 0);
  const fs::path t = scratch("insufficient_tail");
  REQUIRE(lppgeo({"experiment", "run", "tf-exponent", "--n", "32", "--replicates", "2", "--out", t.string()}).code ==
          0);
  CHECK(lppgeo({"experiment", "fit", "--out", t.string()}).code == 4);
  fs::remove_all(d);
  fs::remove_all(t);
}

TEST_CASE("config file values yield to flags and every flag is echoed") {
  const fs::path d = scratch("cfg");
  fs::create_directories(d);
  {
    std::ofstream c(d / "in.json");
    c << R"({"n": 40, "replicates": 3, "seed": 5})";
  }
  const Run r = lppgeo({"experiment", "run", "tw-scaling", "--config", (d / "in.json").string(), "--seed", "9",
                        "--out", (d / "res").string(), "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream s(r.out);
  Json echo;
  s >> echo;
  CHECK(echo["seed"] == 9);
  CHECK(echo["n"] == 40);
  CHECK(echo["replicates"] == 3);
  for (const char* key : {"seed", "replicates", "n", "k", "r", "big_m", "s", "big_s", "h_const", "z", "r_list",
                          "threads", "precision", "checkpoint_block", "out", "format"}) {
    CAPTURE(key);
    CHECK(echo.contains(key));
  }
  CHECK(fs::exists(d / "res" / "records.csv"));
  fs::remove_all(d);
}

TEST_CASE("help lists every flag") {
  const Run r = lppgeo({"experiment", "run", "--help"});
  CHECK(r.code == 0);
  for (const char* flag : {"--seed", "--replicates", "--n", "--k", "--r", "--big-m", "--s", "--big-s", "--h-const",
                           "--z", "--r-list", "--threads", "--precision", "--checkpoint-block", "--out", "--format",
                           "--config"}) {
    CAPTURE(flag);
    CHECK(r.out.find(std::string(flag) + " ") != std::string::npos);
  }
}

TEST_CASE("single-shot subcommands emit json") {
  Run r = lppgeo({"coalesce", "--a", "0,0", "--b", "0,3", "--to", "40,40", "--seed", "2"});
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["v_star"].is_array());

  r = lppgeo({"semi-infinite", "--v", "-2,2", "--w", "2,-2", "--horizon", "16", "--max-doublings", "3"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j.contains("converged"));

  r = lppgeo({"boundary", "--k", "4", "--window", "2", "--max-doublings", "3"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["bits"].get<std::string>().size() == 5);

  r = lppgeo({"barrier", "trial", "--z", "8", "--u0", "0.5", "--v0", "0.5", "--replicate", "3"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["record"]["replicate"] == 3);
  CHECK(j["record"]["flags"].contains("F_meet"));

  r = lppgeo({"field", "dump", "--rect", "0,1,0,2", "--seed", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("x,y,weight\n", 0) == 0);
}

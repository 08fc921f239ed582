// Acceptance runs. One criterion per invocation (--criterion N), or all of
// them in order. Each prints one line "C<N> PASS|FAIL <summary>" and the
// process exits nonzero if any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "lpp/errors.hpp"
#include "lpp/experiments.hpp"
#include "lpp/geometry.hpp"
#include "lpp/passage.hpp"
#include "lpp/stats.hpp"

using namespace lpp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  Json detail;
};

struct Options {
  double scale = 1.0;  // replicate multiplier, below 1 only for smoke runs
  fs::path out;
  unsigned threads = 1;
};

std::uint64_t reps(const Options& o, std::uint64_t n) {
  return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * o.scale)));
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

ExperimentResult run(const Options& o, ExperimentConfig c, const std::string& tag) {
  c.threads = o.threads;
  ExperimentResult r = run_experiment(c);
  if (!o.out.empty()) write_results(o.out / tag, r);
  return r;
}

// Plain recursive enumeration of up/right paths, independent of the sweeps.
struct Enumerated {
  bool found = false;
  double time = 0.0;
  std::vector<Vertex> path;
};

void enumerate(const WeightField& f, const Vertex& v, const Vertex& end, std::vector<Vertex>& cur, double acc,
               const std::function<bool(const std::vector<Vertex>&)>& ok, Enumerated& best) {
  cur.push_back(v);
  if (v == end) {
    if (ok(cur) && (!best.found || acc > best.time)) {
      best.found = true;
      best.time = acc;
      best.path = cur;
    }
  } else {
    const double w = f.weight_at(v);
    if (v.x < end.x) enumerate(f, Vertex{v.x + 1, v.y}, end, cur, acc + w, ok, best);
    if (v.y < end.y) enumerate(f, Vertex{v.x, v.y + 1}, end, cur, acc + w, ok, best);
  }
  cur.pop_back();
}

Enumerated enumerate(const WeightField& f, const Vertex& u, const Vertex& v,
                     const std::function<bool(const std::vector<Vertex>&)>& ok) {
  Enumerated best;
  std::vector<Vertex> cur;
  enumerate(f, u, v, cur, 0.0, ok, best);
  return best;
}

Outcome c1_oracle(const Options&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240101);
  std::uint64_t checks = 0, mismatches = 0, absent = 0;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    const WeightField f = WeightField::unbounded(FieldKey{101, rep});
    const Coord w = 1 + static_cast<Coord>(rng() % 8);
    const Coord h = 1 + static_cast<Coord>(rng() % 8);
    const Vertex u{static_cast<Coord>(rng() % 11) - 5, static_cast<Coord>(rng() % 11) - 5};
    const Vertex v{u.x + w - 1, u.y + h - 1};
    const auto all = [](const std::vector<Vertex>&) { return true; };
    const Enumerated e = enumerate(f, u, v, all);

    ++checks;
    mismatches += !close(passage_time(f, u, v), e.time);
    const Path g = geodesic(f, u, v);
    ++checks;
    mismatches += g.vertices != e.path || !close(g.weight, e.time);

    Region region;
    if (rng() % 2) {
      const Coord x0 = u.x + static_cast<Coord>(rng() % w);
      const Coord y0 = u.y + static_cast<Coord>(rng() % h);
      region = Region::of(Rect{x0, x0 + static_cast<Coord>(rng() % 3), y0, y0 + static_cast<Coord>(rng() % 3)});
    } else {
      region = Region::of(Parallelogram{u.x + static_cast<Coord>(rng() % w), static_cast<Coord>(rng() % 4),
                                        static_cast<Coord>(rng() % 3) + u.x - u.y,
                                        static_cast<Coord>(rng() % 3) - u.x + u.y});
    }
    for (bool avoid : {true, false}) {
      const auto ok = [&](const std::vector<Vertex>& p) {
        const bool hit = std::any_of(p.begin(), p.end(), [&](const Vertex& x) { return region.contains(x); });
        return avoid ? !hit : hit;
      };
      const Enumerated ce = enumerate(f, u, v, ok);
      const auto dp = constrained_passage_time(
          f, u, v, avoid ? Constraint::avoid_region(region) : Constraint::through_region(region));
      ++checks;
      if (dp.has_value() != ce.found) {
        ++mismatches;
        continue;
      }
      if (!ce.found) {
        ++absent;
        continue;
      }
      mismatches += !close(dp->time, ce.time) || dp->path.vertices != ce.path;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = mismatches == 0 && secs < 60.0;
  o.summary = std::to_string(checks) + " comparisons on 1000 fields up to 8x8, " + std::to_string(mismatches) +
              " mismatches (" + std::to_string(absent) + " constrained optima absent in both), " + fmt(secs, 3) +
              " s";
  o.detail = Json{{"checks", checks}, {"mismatches", mismatches}, {"absent", absent}, {"seconds", secs}};
  return o;
}

Outcome c2_tw_exponent(const Options& opt) {
  std::vector<double> lx, ly;
  Json per = Json::array();
  for (Coord n : {250, 500, 1000, 2000}) {
    ExperimentConfig c;
    c.name = "tw-scaling";
    c.seed = 2;
    c.n = n;
    c.replicates = reps(opt, 400);
    const auto r = run(opt, c, "c2_n" + std::to_string(n));
    const double sd = r.fit["T"]["std"].get<double>();
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(sd));
    per.push_back(Json{{"n", n}, {"std_T", sd}, {"mean_T_over_n", r.fit["mean_T_over_n"]}});
  }
  const LinearFit f = least_squares(lx, ly);
  Outcome o;
  o.pass = f.slope >= 0.23 && f.slope <= 0.43;
  o.summary = "slope of log std(T) on log n = " + fmt(f.slope) + " +- " + fmt(f.slope_se, 2) + " (target [0.23, 0.43])";
  o.detail = Json{{"slope", f.slope}, {"stderr", f.slope_se}, {"points", per}};
  return o;
}

Outcome c3_mean_growth(const Options& opt) {
  ExperimentConfig c;
  c.name = "tw-scaling";
  c.seed = 2;
  c.n = 1000;
  c.replicates = reps(opt, 400);
  const auto r = run(opt, c, "c3_n1000");
  const double m = r.fit["mean_T_over_n"].get<double>();
  const double se = r.fit["T"]["std"].get<double>() / 1000.0 / std::sqrt(static_cast<double>(c.replicates));
  Outcome o;
  o.pass = m >= 3.90 && m <= 4.00;
  o.summary = "mean T/n at n=1000 = " + fmt(m, 5) + " +- " + fmt(se, 2) + " (target [3.90, 4.00])";
  o.detail = Json{{"mean_T_over_n", m}, {"stderr", se}};
  return o;
}

Outcome c4_tf_exponent(const Options& opt) {
  std::vector<double> lx, ly;
  Json per = Json::array();
  for (Coord n : {256, 512, 1024, 2048, 4096}) {
    ExperimentConfig c;
    c.name = "tf-exponent";
    c.seed = 4;
    c.n = n;
    c.replicates = reps(opt, 400);
    const auto r = run(opt, c, "c4_n" + std::to_string(n));
    const double sd = r.fit["dev"]["std"].get<double>();
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(sd));
    per.push_back(Json{{"n", n}, {"std_dev", sd}});
  }
  const LinearFit f = least_squares(lx, ly);
  Outcome o;
  o.pass = f.slope >= 0.55 && f.slope <= 0.80;
  o.summary = "slope of log std(Gamma(n/2) - n/2) on log n = " + fmt(f.slope) + " +- " + fmt(f.slope_se, 2) +
              " (target [0.55, 0.80])";
  o.detail = Json{{"slope", f.slope}, {"stderr", f.slope_se}, {"points", per}};
  return o;
}

Outcome c5_local_tail(const Options& opt) {
  ExperimentConfig c;
  c.name = "local-tf-tail";
  c.seed = 5;
  c.n = 8192;
  c.ell = 512;
  c.s_list = {0.5, 1, 2, 3};
  c.replicates = reps(opt, 2000);
  const auto r = run(opt, c, "c5");
  const auto& rows = r.tails->rows;
  bool dec = true;
  std::string ps;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i && !(rows[i].p < rows[i - 1].p)) dec = false;
    ps += (i ? ", " : "") + fmt(rows[i].p, 3);
  }
  Outcome o;
  o.pass = dec && rows.back().p <= 0.05;
  o.summary = "P(|Gamma(512)-512| >= s 512^{2/3}) at s = 0.5,1,2,3: " + ps + (dec ? " strictly decreasing" : " NOT strictly decreasing") +
              ", P(s=3) target <= 0.05";
  o.detail = r.fit;
  return o;
}

Outcome c6_semi_infinite(const Options& opt) {
  ExperimentConfig c;
  c.name = "semi-infinite-tail";
  c.seed = 6;
  c.k = 64;
  c.r_list = {1, 2, 4, 8, 16};
  c.replicates = reps(opt, 2000);
  const auto r = run(opt, c, "c6");
  Outcome o;
  const Json& pl = r.fit["power_law"];
  std::string ps;
  for (const auto& row : r.tails->rows) ps += (ps.empty() ? "" : ", ") + fmt(row.p, 3);
  const std::string base = "k=64, P(d > Rk) at R=1..16: " + ps + ", unconverged " + r.fit["unconverged"].dump();
  if (pl.contains("error")) {
    o.summary = base + ", fit failed: " + pl["error"].get<std::string>();
  } else {
    const double s = pl["slope"].get<double>();
    o.pass = s >= -0.93 && s <= -0.43;
    o.summary = base + ", fitted slope " + fmt(s) + " +- " + fmt(pl["stderr"].get<double>(), 2) +
                " (target [-0.93, -0.43])";
  }
  o.detail = r.fit;
  return o;
}

Outcome c7_boundary(const Options& opt) {
  std::vector<double> scaled;
  Json per = Json::array();
  bool band = true;
  std::string s;
  for (auto [k, n] : {std::pair<Coord, std::uint64_t>{64, 400}, {256, 200}, {1024, 100}}) {
    ExperimentConfig c;
    c.name = "boundary-density";
    c.seed = 7;
    c.k = k;
    c.replicates = reps(opt, n);
    const auto r = run(opt, c, "c7_k" + std::to_string(k));
    const double v = r.fit["scaled"].get<double>();
    scaled.push_back(v);
    band = band && v >= 0.2 && v <= 5.0;
    s += (s.empty() ? "" : ", ") + fmt(v, 3);
    per.push_back(Json{{"k", k}, {"fit", r.fit}});
  }
  const double ratio = *std::max_element(scaled.begin(), scaled.end()) / *std::min_element(scaled.begin(), scaled.end());
  Outcome o;
  o.pass = band && ratio <= 3.0;
  o.summary = "k^{2/3} P(X=1) at k=64,256,1024: " + s + " (band [0.2, 5]), max/min " + fmt(ratio, 3) + " (<= 3)";
  o.detail = Json{{"points", per}, {"ratio", ratio}};
  return o;
}

Outcome c8_coal(const Options& opt) {
  ExperimentConfig c;
  c.name = "coal-rM";
  c.seed = 8;
  c.r = 64;
  c.big_m = 64;
  c.big_l = 1;
  c.replicates = reps(opt, 500);
  const auto r = run(opt, c, "c8");
  const double p = r.fit["Coal"]["p"].get<double>();
  Outcome o;
  o.pass = p >= 0.4;
  o.summary = "P(Coal_{64,64}) = " + fmt(p, 3) + " [" + fmt(r.fit["Coal"]["lo"].get<double>(), 3) + ", " +
              fmt(r.fit["Coal"]["hi"].get<double>(), 3) + "] over " + std::to_string(c.replicates) + " (target >= 0.4)";
  o.detail = r.fit;
  return o;
}

Outcome c9_barrier(const Options& opt) {
  Json per = Json::array();
  double p16 = 0.0, p64 = 0.0;
  std::uint64_t violations64 = 0, favourable64 = 0;
  for (Coord z : {16, 64}) {
    ExperimentConfig c;
    c.name = "barrier-events";
    c.seed = 9;
    c.z = z;
    c.replicates = reps(opt, 500);
    const auto r = run(opt, c, "c9_z" + std::to_string(z));
    const double p = r.fit["F_meet"]["p"].get<double>();
    (z == 16 ? p16 : p64) = p;
    if (z == 64) {
      violations64 = r.fit["audit_violations"].get<std::uint64_t>();
      favourable64 = r.fit["favourable"].get<std::uint64_t>();
    }
    per.push_back(Json{{"z", z}, {"fit", r.fit}});
  }
  const double ratio = std::max(p16, p64) / std::max(1e-300, std::min(p16, p64));
  Outcome o;
  o.pass = violations64 == 0 && p64 >= 0.1 && ratio <= 3.0;
  o.summary = "z=64: " + std::to_string(favourable64) + " favourable, " + std::to_string(violations64) +
              " without F_meet; P(F_meet) z=16 " + fmt(p16, 3) + ", z=64 " + fmt(p64, 3) + " (>= 0.1), ratio " +
              fmt(ratio, 3) + " (<= 3)";
  o.detail = Json{{"points", per}};
  return o;
}

Outcome c10_ordering(const Options&) {
  std::mt19937_64 rng(1010);
  std::uint64_t violations = 0, columns = 0;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    const WeightField f = WeightField::unbounded(FieldKey{110, rep});
    const Coord a1 = static_cast<Coord>(rng() % 64) - 32;
    const Coord b1 = a1 + 1 + static_cast<Coord>(rng() % 160);
    Coord y[4];
    for (auto& v : y) v = static_cast<Coord>(rng() % 160) - 40;
    std::sort(y, y + 4);
    const Path g = geodesic(f, Vertex{a1, y[0]}, Vertex{b1, y[2]});
    const Path gp = geodesic(f, Vertex{a1, y[1]}, Vertex{b1, y[3]});
    for (Coord x = a1; x <= b1; ++x) {
      ++columns;
      violations += gamma_at(g, x) > gamma_at(gp, x);
    }
  }
  Outcome o;
  o.pass = violations == 0;
  o.summary = "1000 quadruples, " + std::to_string(columns) + " columns compared, " + std::to_string(violations) +
              " violations";
  o.detail = Json{{"columns", columns}, {"violations", violations}};
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome c11_determinism(const Options&) {
  std::vector<ExperimentConfig> cfgs;
  auto add = [&](const std::string& name, const std::function<void(ExperimentConfig&)>& set) {
    ExperimentConfig c;
    c.name = name;
    c.seed = 11;
    c.replicates = 16;
    set(c);
    cfgs.push_back(c);
  };
  add("tw-scaling", [](ExperimentConfig& c) { c.n = 200; });
  add("tf-exponent", [](ExperimentConfig& c) { c.n = 256; });
  add("local-tf-tail", [](ExperimentConfig& c) {
    c.n = 1024;
    c.ell = 64;
  });
  add("finite-coalescence", [](ExperimentConfig& c) {
    c.k = 8;
    c.n = 256;
  });
  add("semi-infinite-tail", [](ExperimentConfig& c) {
    c.k = 8;
    c.r_list = {1, 2, 4};
  });
  add("boundary-density", [](ExperimentConfig& c) { c.k = 16; });
  add("barrier-events", [](ExperimentConfig& c) {
    c.z = 16;
    c.replicates = 8;
  });
  add("coal-rM", [](ExperimentConfig& c) {
    c.r = 8;
    c.big_m = 16;
  });
  const fs::path root = fs::temp_directory_path() / "lpp_acceptance_c11";
  std::uint64_t differing = 0, files = 0;
  std::string bad;
  for (ExperimentConfig c : cfgs) {
    const fs::path d1 = root / (c.name + "_t1");
    const fs::path d8 = root / (c.name + "_t8");
    fs::remove_all(d1);
    fs::remove_all(d8);
    c.threads = 1;
    write_results(d1, run_experiment(c));
    c.threads = 8;
    write_results(d8, run_experiment(c));
    std::vector<std::string> n1, n8;
    for (const auto& e : fs::directory_iterator(d1)) n1.push_back(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(d8)) n8.push_back(e.path().filename().string());
    std::sort(n1.begin(), n1.end());
    std::sort(n8.begin(), n8.end());
    bool same = n1 == n8;
    for (const auto& f : n1) {
      ++files;
      same = same && slurp(d1 / f) == slurp(d8 / f);
    }
    if (!same) {
      ++differing;
      bad += " " + c.name;
    }
  }
  fs::remove_all(root);
  Outcome o;
  o.pass = differing == 0;
  o.summary = std::to_string(cfgs.size()) + " experiments, " + std::to_string(files) +
              " files compared at 1 vs 8 threads, " + std::to_string(differing) + " differing" + bad;
  o.detail = Json{{"experiments", cfgs.size()}, {"files", files}, {"differing", differing}};
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> which;
  Options opt;
  std::string out;
  app.add_option("--criterion", which, "criterion numbers (default: all)")->check(CLI::Range(1, 11));
  app.add_option("--scale", opt.scale, "replicate multiplier for smoke runs")->check(CLI::Range(0.001, 1.0));
  app.add_option("--out", out, "directory for per-criterion results");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1U, 1024U));
  CLI11_PARSE(app, argc, argv);
  if (!out.empty()) {
    opt.out = out;
    fs::create_directories(opt.out);
  }
  if (which.empty()) {
    for (int i = 1; i <= 11; ++i) which.push_back(i);
  }
  const std::vector<std::function<Outcome(const Options&)>> all{
      c1_oracle,     c2_tw_exponent, c3_mean_growth, c4_tf_exponent, c5_local_tail,  c6_semi_infinite,
      c7_boundary,   c8_coal,        c9_barrier,     c10_ordering,   c11_determinism};
  bool ok = true;
  for (int i : which) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = all[static_cast<std::size_t>(i - 1)](opt);
    } catch (const std::exception& e) {
      r.summary = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "C" << i << (r.pass ? " PASS " : " FAIL ") << r.summary << " [" << fmt(secs, 3) << " s]"
              << std::endl;
    if (!opt.out.empty()) {
      Json j{{"criterion", i}, {"pass", r.pass}, {"summary", r.summary}, {"seconds", secs}, {"detail", r.detail}};
      std::ofstream(opt.out / ("C" + std::to_string(i) + ".json")) << j.dump(2) << '\n';
    }
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

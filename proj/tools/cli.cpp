#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "lpp/barrier.hpp"
#include "lpp/errors.hpp"
#include "lpp/experiments.hpp"
#include "lpp/field.hpp"
#include "lpp/geometry.hpp"
#include "lpp/io.hpp"
#include "lpp/passage.hpp"

namespace lpp::cli {

namespace {

Vertex parse_vertex(const std::string& s, const std::string& flag) {
  std::istringstream in(s);
  long long x = 0, y = 0;
  char comma = 0;
  if (!(in >> x >> comma >> y) || comma != ',' || !in.eof()) {
    throw ParameterError(flag + ": expected x,y, got '" + s + "'");
  }
  return Vertex{static_cast<Coord>(x), static_cast<Coord>(y)};
}

Rect parse_rect(const std::string& s) {
  std::istringstream in(s);
  long long v[4];
  char c[3] = {};
  if (!(in >> v[0] >> c[0] >> v[1] >> c[1] >> v[2] >> c[2] >> v[3]) || c[0] != ',' || c[1] != ',' || c[2] != ',' ||
      !in.eof()) {
    throw ParameterError("--rect: expected x_min,x_max,y_min,y_max, got '" + s + "'");
  }
  Rect r{static_cast<Coord>(v[0]), static_cast<Coord>(v[1]), static_cast<Coord>(v[2]), static_cast<Coord>(v[3])};
  if (r.x_min > r.x_max || r.y_min > r.y_max) throw ParameterError("--rect: empty rectangle");
  return r;
}

// Flag values that feed an ExperimentConfig. Each subcommand registers the
// subset it reads; only flags given on the command line override the config.
struct ConfigFlags {
  ExperimentConfig v;
  std::uint64_t replicate = 0;
  std::string precision = "double";
  Coord n = 0;
  double big_m = 0.0;
  Coord window = 0;
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> setters;

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& var, const std::string& desc,
                   std::function<void(ExperimentConfig&)> set) {
    CLI::Option* o = app->add_option(name, var, desc);
    setters.emplace_back(o, std::move(set));
    return o;
  }

  void add_run(CLI::App* app) {
    add(app, "--seed", v.seed, "field seed", [this](ExperimentConfig& c) { c.seed = v.seed; });
    add(app, "--precision", precision, "surface precision", [this](ExperimentConfig& c) {
      c.precision = precision == "single" ? Precision::kSingle : Precision::kDouble;
    })->check(CLI::IsMember({"single", "double"}));
    add(app, "--checkpoint-block", v.checkpoint_block, "retain every B-th anti-diagonal in checkpointed sweeps",
        [this](ExperimentConfig& c) { c.checkpoint_block = v.checkpoint_block; })
        ->check(CLI::Range(Coord{1}, Coord{1} << 20));
  }

  void add_replicate(CLI::App* app) {
    app->add_option("--replicate", replicate, "replicate index of the field")->check(CLI::NonNegativeNumber);
  }

  void add_scheme(CLI::App* app) {
    add(app, "--target-factor", v.scheme.initial_target_factor, "first target is factor * horizon",
        [this](ExperimentConfig& c) { c.scheme.initial_target_factor = v.scheme.initial_target_factor; })
        ->check(CLI::Range(Coord{1}, Coord{1} << 20));
    add(app, "--max-doublings", v.scheme.max_doublings, "target doublings before giving up",
        [this](ExperimentConfig& c) { c.scheme.max_doublings = v.scheme.max_doublings; })
        ->check(CLI::Range(0, 24));
    add(app, "--horizon", v.scheme.horizon, "prefix horizon of the semi-infinite scheme",
        [this](ExperimentConfig& c) { c.scheme.horizon = v.scheme.horizon; })
        ->check(CLI::Range(Coord{1}, Coord{1} << 24));
  }

  void add_barrier(CLI::App* app) {
    add(app, "--z", v.z, "barrier scale z", [this](ExperimentConfig& c) { c.z = v.z; })
        ->check(CLI::Range(Coord{8}, Coord{1} << 12));
    add(app, "--big-m", big_m, "barrier wall constant M (coal-rM: endpoint ratio M)",
        [this](ExperimentConfig& c) { c.big_m = big_m; })
        ->check(CLI::PositiveNumber);
    add(app, "--big-s", v.big_s, "barrier wall width S", [this](ExperimentConfig& c) { c.big_s = v.big_s; })
        ->check(CLI::PositiveNumber);
    add(app, "--h-const", v.h_const, "wing constant H", [this](ExperimentConfig& c) { c.h_const = v.h_const; })
        ->check(CLI::PositiveNumber);
    add(app, "--u0", v.u0, "offset of a1, b1", [this](ExperimentConfig& c) { c.u0 = v.u0; })
        ->check(CLI::NonNegativeNumber);
    add(app, "--v0", v.v0, "offset of a2, b2", [this](ExperimentConfig& c) { c.v0 = v.v0; })
        ->check(CLI::NonNegativeNumber);
    add(app, "--strict-above", v.strict_above, "paths must stay strictly above the barrier geodesic",
        [this](ExperimentConfig& c) { c.strict_above = v.strict_above; });
  }

  void add_experiment(CLI::App* app) {
    add_run(app);
    add(app, "--replicates", v.replicates, "number of replicates",
        [this](ExperimentConfig& c) { c.replicates = v.replicates; })
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 32));
    add(app, "--threads", v.threads, "worker threads", [this](ExperimentConfig& c) { c.threads = v.threads; })
        ->check(CLI::Range(1U, 1024U));
    add(app, "--n", n, "system size", [this](ExperimentConfig& c) { c.n = n; })
        ->check(CLI::Range(Coord{2}, Coord{1} << 28));
    add(app, "--k", v.k, "scale k", [this](ExperimentConfig& c) { c.k = v.k; })
        ->check(CLI::Range(Coord{1}, Coord{1} << 24));
    add(app, "--r", v.r, "coal-rM start scale r", [this](ExperimentConfig& c) { c.r = v.r; })
        ->check(CLI::Range(Coord{1}, Coord{1} << 24));
    add(app, "--s", v.s_list, "tail thresholds s (comma separated)",
        [this](ExperimentConfig& c) { c.s_list = v.s_list; })
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    add(app, "--r-list", v.r_list, "tail thresholds R in units of k (comma separated)",
        [this](ExperimentConfig& c) { c.r_list = v.r_list; })
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    add(app, "--slope", v.slope, "endpoint (n, floor(slope n))", [this](ExperimentConfig& c) { c.slope = v.slope; })
        ->check(CLI::PositiveNumber);
    add(app, "--big-l", v.big_l, "coal-rM offset L", [this](ExperimentConfig& c) { c.big_l = v.big_l; })
        ->check(CLI::NonNegativeNumber);
    add(app, "--ell", v.ell, "local tail column", [this](ExperimentConfig& c) { c.ell = v.ell; })
        ->check(CLI::Range(Coord{1}, Coord{1} << 28));
    add(app, "--window", window, "boundary indices in [-window, window]",
        [this](ExperimentConfig& c) { c.window = window; })
        ->check(CLI::Range(Coord{0}, Coord{1} << 20));
    add(app, "--sensitivity", v.sensitivity, "finite coalescence: repeat each replicate at 2n",
        [this](ExperimentConfig& c) { c.sensitivity = v.sensitivity; });
    add_barrier(app);
    add_scheme(app);
  }

  void apply(ExperimentConfig& c) const {
    for (const auto& [opt, set] : setters) {
      if (opt->count() > 0) set(c);
    }
  }
};

SurfaceOptions options_of(const ExperimentConfig& c) {
  SurfaceOptions o;
  o.precision = c.precision;
  o.checkpoint_block = c.checkpoint_block;
  return o;
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  f << j.dump(2) << '\n';
}

bool insufficient(const Json& j) {
  if (j.is_object()) {
    if (j.contains("insufficient")) return true;
    for (const auto& [k, v] : j.items()) {
      if (insufficient(v)) return true;
    }
  }
  return false;
}

const CLI::App* deepest(const CLI::App* app) {
  for (const CLI::App* sub : app->get_subcommands()) return deepest(sub);
  return app;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential directed last passage percolation: geodesics, coalescence and barrier events",
               "lppgeo"};
  app.require_subcommand(1);
  ConfigFlags flags;
  std::string out_path;
  std::function<int()> action;

  // field dump
  CLI::App* field = app.add_subcommand("field", "weight field utilities")->require_subcommand(1);
  CLI::App* dump = field->add_subcommand("dump", "dump the weights of a rectangle");
  std::string rect_s;
  std::string dump_format = "csv";
  flags.add_run(dump);
  flags.add_replicate(dump);
  dump->add_option("--rect", rect_s, "x_min,x_max,y_min,y_max")->required();
  dump->add_option("--format", dump_format, "csv or binary block dump")->check(CLI::IsMember({"csv", "binary"}));
  dump->add_option("--out", out_path, "output file (stdout for csv when omitted)");
  dump->callback([&] {
    action = [&] {
      ExperimentConfig c;
      flags.apply(c);
      const Rect r = parse_rect(rect_s);
      const WeightGrid g = materialize_block(WeightField::unbounded(FieldKey{c.seed, flags.replicate}), r);
      if (dump_format == "binary") {
        if (out_path.empty()) throw ParameterError("--out is required for --format binary");
        std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + out_path);
        write_block_binary(f, g);
      } else if (out_path.empty()) {
        write_block_csv(out, g);
      } else {
        std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + out_path);
        write_block_csv(f, g);
      }
      return kOk;
    };
  });

  // geodesic
  CLI::App* geo = app.add_subcommand("geodesic", "geodesic and passage time between two vertices");
  std::string from_s, to_s;
  flags.add_run(geo);
  flags.add_replicate(geo);
  geo->add_option("--from", from_s, "start vertex x,y")->required();
  geo->add_option("--to", to_s, "end vertex x,y")->required();
  geo->add_option("--out", out_path, "output JSON file (stdout when omitted)");
  geo->callback([&] {
    action = [&] {
      ExperimentConfig c;
      flags.apply(c);
      const Vertex u = parse_vertex(from_s, "--from");
      const Vertex v = parse_vertex(to_s, "--to");
      const WeightField f = WeightField::unbounded(FieldKey{c.seed, flags.replicate});
      const Path p = geodesic(f, u, v, options_of(c));
      Json j;
      j["field"] = to_json(f.key());
      j["from"] = to_json(u);
      j["to"] = to_json(v);
      j["time"] = p.weight;
      j["path"] = to_json(p);
      emit(j, out_path, out);
      return kOk;
    };
  });

  // coalesce
  CLI::App* coal = app.add_subcommand("coalesce", "meeting point of two geodesics to a common target");
  std::string a_s, b_s, target_s;
  flags.add_run(coal);
  flags.add_replicate(coal);
  coal->add_option("--a", a_s, "first start x,y")->required();
  coal->add_option("--b", b_s, "second start x,y")->required();
  coal->add_option("--to", target_s, "common target x,y")->required();
  coal->add_option("--out", out_path, "output JSON file (stdout when omitted)");
  coal->callback([&] {
    action = [&] {
      ExperimentConfig c;
      flags.apply(c);
      const Vertex a = parse_vertex(a_s, "--a");
      const Vertex b = parse_vertex(b_s, "--b");
      const Vertex t = parse_vertex(target_s, "--to");
      const WeightField f = WeightField::unbounded(FieldKey{c.seed, flags.replicate});
      const Path pa = geodesic(f, a, t, options_of(c));
      const Path pb = geodesic(f, b, t, options_of(c));
      const auto cp = coalescence_point(pa, pb);
      Json j;
      j["field"] = to_json(f.key());
      j["a"] = to_json(a);
      j["b"] = to_json(b);
      j["to"] = to_json(t);
      j["v_star"] = cp ? to_json(cp->v_star) : Json(nullptr);
      j["v1"] = cp ? Json(cp->min_x) : Json(nullptr);
      j["d"] = cp ? Json(antidiagonal(cp->v_star)) : Json(nullptr);
      emit(j, out_path, out);
      return kOk;
    };
  });

  // semi-infinite
  CLI::App* semi = app.add_subcommand("semi-infinite", "coalescence distance of two semi-infinite geodesics");
  std::string v_s, w_s;
  Coord first_horizon = 0;
  flags.add_run(semi);
  flags.add_replicate(semi);
  flags.add_scheme(semi);
  semi->add_option("--v", v_s, "first start x,y")->required();
  semi->add_option("--w", w_s, "second start x,y")->required();
  semi->add_option("--first-horizon", first_horizon, "stage the horizon from this value up to --horizon")
      ->check(CLI::Range(Coord{1}, Coord{1} << 24));
  semi->add_option("--out", out_path, "output JSON file (stdout when omitted)");
  semi->callback([&] {
    action = [&] {
      ExperimentConfig c;
      flags.apply(c);
      c.scheme.validate();
      const Vertex v = parse_vertex(v_s, "--v");
      const Vertex w = parse_vertex(w_s, "--w");
      const WeightField f = WeightField::unbounded(FieldKey{c.seed, flags.replicate});
      const CoalescenceRecord rec =
          first_horizon > 0 ? staged_coalescence_distance(f, v, w, std::min(first_horizon, c.scheme.horizon),
                                                          c.scheme.horizon, c.scheme, options_of(c))
                            : coalescence_distance(f, v, w, c.scheme, options_of(c));
      Json j;
      j["field"] = to_json(f.key());
      j["v"] = to_json(v);
      j["w"] = to_json(w);
      j.update(to_json(rec));
      emit(j, out_path, out);
      return kOk;
    };
  });

  // boundary
  CLI::App* bnd = app.add_subcommand("boundary", "boundary indicators X_i for u_i = (-i, i)");
  Coord bk = 64;
  Coord window = -1;
  flags.add_run(bnd);
  flags.add_replicate(bnd);
  flags.add_scheme(bnd);
  bnd->add_option("--k", bk, "scale k")->check(CLI::Range(Coord{1}, Coord{1} << 24));
  bnd->add_option("--window", window, "indices in [-window, window] (default floor(k^{2/3}))")
      ->check(CLI::Range(Coord{0}, Coord{1} << 20));
  bnd->add_option("--out", out_path, "output JSON file (stdout when omitted)");
  bnd->callback([&] {
    action = [&] {
      ExperimentConfig c;
      flags.apply(c);
      c.scheme.validate();
      const Coord w = window >= 0 ? window : floor_scaled_power(1.0, static_cast<double>(bk), 2.0 / 3.0);
      const WeightField f = WeightField::unbounded(FieldKey{c.seed, flags.replicate});
      const BoundaryIndicators b = boundary_indicators(f, bk, -w, w, c.scheme, options_of(c));
      std::string bits;
      for (auto x : b.bits) bits += x ? '1' : '0';
      Json j;
      j["field"] = to_json(f.key());
      j["k"] = bk;
      j["i_first"] = b.i_first;
      j["bits"] = bits;
      j["converged"] = b.converged;
      j["target_N"] = b.target_used.x;
      emit(j, out_path, out);
      return kOk;
    };
  });

  // barrier trial
  CLI::App* bar = app.add_subcommand("barrier", "barrier construction")->require_subcommand(1);
  CLI::App* trial = bar->add_subcommand("trial", "one replicate of the barrier and favourable events");
  flags.add_run(trial);
  flags.add_replicate(trial);
  flags.add_barrier(trial);
  trial->add_option("--out", out_path, "output JSON file (stdout when omitted)");
  trial->callback([&] {
    action = [&] {
      ExperimentConfig c;
      c.name = "barrier-events";
      flags.apply(c);
      c.replicates = 1;
      c.validate();
      Json j;
      j["config"] = config_to_json(c);
      j["record"] = run_replicate(c, flags.replicate);
      emit(j, out_path, out);
      return kOk;
    };
  });

  // experiment run / fit
  CLI::App* exp = app.add_subcommand("experiment", "experiment presets")->require_subcommand(1);
  CLI::App* erun = exp->add_subcommand("run", "run an experiment and write a results directory");
  std::string name, config_path, format = "jsonl";
  std::string names_help;
  for (const auto& n : experiment_names()) names_help += (names_help.empty() ? "" : ", ") + n;
  erun->add_option("name", name, "one of " + names_help)->required()->check(CLI::IsMember(experiment_names()));
  erun->add_option("--config", config_path, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  flags.add_experiment(erun);
  erun->add_option("--out", out_path, "results directory")->required();
  erun->add_option("--format", format, "record format")->check(CLI::IsMember({"csv", "jsonl"}));
  erun->callback([&] {
    action = [&] {
      ExperimentConfig c;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        Json j;
        try {
          j = Json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
          throw ParameterError(config_path + ": " + e.what());
        }
        config_from_json(j, c);
      }
      c.name = name;
      flags.apply(c);
      c.validate();
      Json echo = config_to_json(c);
      echo["threads"] = c.threads;
      echo["out"] = out_path;
      echo["format"] = format;
      out << echo.dump(2) << '\n';
      const ExperimentResult res = run_experiment(c);
      write_results(out_path, res, format == "csv" ? RecordFormat::kCsv : RecordFormat::kJsonl);
      out << res.fit.dump(2) << '\n';
      if (insufficient(res.fit)) err << "warning: too little data for the fit; see fit.json\n";
      return kOk;
    };
  });

  CLI::App* efit = exp->add_subcommand("fit", "recompute tails and fits from a results directory");
  efit->add_option("--out", out_path, "results directory")->required()->check(CLI::ExistingDirectory);
  efit->callback([&] {
    action = [&] {
      const ExperimentResult res = load_and_summarize(out_path);
      ExperimentConfig c;
      config_from_json(res.config, c);
      write_results(out_path, res,
                    std::filesystem::exists(std::filesystem::path(out_path) / "records.csv") ? RecordFormat::kCsv
                                                                                             : RecordFormat::kJsonl);
      out << res.fit.dump(2) << '\n';
      return insufficient(res.fit) ? kInsufficientData : kOk;
    };
  });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << deepest(&app)->help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << deepest(&app)->help();
    return kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const InsufficientDataError& e) {
    err << "insufficient data: " << e.what() << '\n';
    return kInsufficientData;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const OrderError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace lpp::cli

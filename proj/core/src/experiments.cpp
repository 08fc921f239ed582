#include "lpp/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "lpp/barrier.hpp"
#include "lpp/errors.hpp"
#include "lpp/passage.hpp"

namespace lpp {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kinds() {
  static const std::vector<std::pair<ExperimentKind, std::string>> k{
      {ExperimentKind::kTwScaling, "tw-scaling"},
      {ExperimentKind::kTfExponent, "tf-exponent"},
      {ExperimentKind::kLocalTfTail, "local-tf-tail"},
      {ExperimentKind::kFiniteCoalescence, "finite-coalescence"},
      {ExperimentKind::kSemiInfiniteTail, "semi-infinite-tail"},
      {ExperimentKind::kBoundaryDensity, "boundary-density"},
      {ExperimentKind::kBarrierEvents, "barrier-events"},
      {ExperimentKind::kCoalRM, "coal-rM"},
  };
  return k;
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ParameterError(field + ": " + what);
}

SurfaceOptions surface_options(const ExperimentConfig& cfg) {
  SurfaceOptions o;
  o.precision = cfg.precision;
  o.checkpoint_block = cfg.checkpoint_block;
  return o;
}

WeightField field_of(const ExperimentConfig& cfg, std::uint64_t replicate) {
  return WeightField::unbounded(FieldKey{cfg.seed, replicate});
}

Json base_record(const ExperimentConfig& cfg, std::uint64_t replicate) {
  return Json{{"seed", cfg.seed}, {"replicate", replicate}};
}

double big_m_of(const ExperimentConfig& cfg) {
  if (cfg.big_m) return *cfg.big_m;
  return parse_experiment(cfg.name) == ExperimentKind::kCoalRM ? 64.0 : 2.0;
}

Coord window_of(const ExperimentConfig& cfg) {
  return cfg.window ? *cfg.window : floor_scaled_power(1.0, static_cast<double>(cfg.k), 2.0 / 3.0);
}

BarrierParams barrier_params(const ExperimentConfig& cfg) {
  BarrierParams p;
  p.z = cfg.z;
  p.big_m = big_m_of(cfg);
  p.big_s = cfg.big_s;
  p.big_h = cfg.h_const;
  p.u0 = cfg.u0;
  p.v0 = cfg.v0;
  p.strict_above = cfg.strict_above;
  return p;
}

// Γ(column) of the geodesic (0,0) -> (n,n), traced only as far as needed.
Coord geodesic_height(const ExperimentConfig& cfg, const WeightField& f, Coord n, Coord column) {
  const auto surf = PassageSurface::backward(f, Vertex{n, n}, Rect{0, n, 0, n}, surface_options(cfg));
  TraceStop stop;
  if (column < n) stop.max_column = column + 1;
  return gamma_at(surf.trace(Vertex{0, 0}, stop), column);
}

Json tw_replicate(const ExperimentConfig& cfg, std::uint64_t rep) {
  const Coord n = effective_n(cfg);
  const Vertex end{n, floor_tolerant(cfg.slope * static_cast<double>(n))};
  const double t = passage_time(field_of(cfg, rep), Vertex{0, 0}, end, cfg.precision);
  const double mu = std::pow(1.0 + std::sqrt(cfg.slope), 2.0) * static_cast<double>(n);
  Json j = base_record(cfg, rep);
  j["n"] = n;
  j["end"] = to_json(end);
  j["T"] = t;
  j["scaled"] = (t - mu) / std::cbrt(static_cast<double>(n));
  return j;
}

Json tf_replicate(const ExperimentConfig& cfg, std::uint64_t rep, Coord column, double scale) {
  const Coord n = effective_n(cfg);
  const Coord g = geodesic_height(cfg, field_of(cfg, rep), n, column);
  Json j = base_record(cfg, rep);
  j["n"] = n;
  j["column"] = column;
  j["gamma"] = g;
  j["dev"] = g - column;
  j["scaled"] = static_cast<double>(g - column) / scale;
  return j;
}

Json finite_replicate(const ExperimentConfig& cfg, std::uint64_t rep) {
  const Coord n = effective_n(cfg);
  const WeightField f = field_of(cfg, rep);
  const Vertex v1{0, 0};
  const Vertex v2{0, floor_scaled_power(1.0, static_cast<double>(cfg.k), 2.0 / 3.0)};
  const auto surf = PassageSurface::backward(f, Vertex{n, n}, Rect{0, n, 0, n}, surface_options(cfg));
  GeodesicTracer tracer(surf);
  const Path p1 = tracer.trace(v1);
  const Path p2 = tracer.trace(v2);
  const auto c = coalescence_point(p1, p2);
  Json j = base_record(cfg, rep);
  j["k"] = cfg.k;
  j["n"] = n;
  j["v_star"] = to_json(c->v_star);
  j["v1"] = c->min_x;
  j["d"] = antidiagonal(c->v_star);
  if (cfg.sensitivity) {
    const Coord n2 = 2 * n;
    const auto s2 = PassageSurface::backward(f, Vertex{n2, n2}, Rect{0, n2, 0, n2}, surface_options(cfg));
    GeodesicTracer t2(s2);
    j["v1_2n"] = coalescence_point(t2.trace(v1), t2.trace(v2))->min_x;
  }
  return j;
}

Json semi_replicate(const ExperimentConfig& cfg, std::uint64_t rep) {
  const std::vector<double> rs = effective_thresholds(cfg);
  const Coord kk = floor_scaled_power(1.0, static_cast<double>(cfg.k), 2.0 / 3.0);
  const Coord h_max = static_cast<Coord>(std::ceil(rs.back() * static_cast<double>(cfg.k)));
  const Coord h0 = std::min(h_max, std::max<Coord>(1, cfg.k));
  const CoalescenceRecord rec = staged_coalescence_distance(field_of(cfg, rep), Vertex{-kk, kk}, Vertex{kk, -kk},
                                                            h0, h_max, cfg.scheme, surface_options(cfg));
  Json j = base_record(cfg, rep);
  j["k"] = cfg.k;
  j["R"] = rs.back();
  j.update(to_json(rec));
  return j;
}

Json boundary_replicate(const ExperimentConfig& cfg, std::uint64_t rep) {
  const Coord w = window_of(cfg);
  const BoundaryIndicators b = boundary_indicators(field_of(cfg, rep), cfg.k, -w, w, cfg.scheme, surface_options(cfg));
  std::string bits;
  Coord ones = 0;
  for (auto x : b.bits) {
    bits += x ? '1' : '0';
    ones += x;
  }
  Json j = base_record(cfg, rep);
  j["k"] = cfg.k;
  j["i_first"] = b.i_first;
  j["bits"] = bits;
  j["ones"] = ones;
  j["converged"] = b.converged;
  j["target_N"] = b.target_used.x;
  return j;
}

Json barrier_replicate(const ExperimentConfig& cfg, std::uint64_t rep) {
  const BarrierParams p = barrier_params(cfg);
  const BarrierSpec spec = build_spec(p);
  const EventFlags e = run_coalescence_trial(field_of(cfg, rep), spec);
  Json j = base_record(cfg, rep);
  j["z"] = p.z;
  j["M"] = p.big_m;
  j["S"] = p.big_s;
  j["H"] = p.big_h;
  j.update(to_json(e));
  j["T_gamma"] = e.path.t_gamma;
  j["barrier_max"] = e.barrier_max == kNegInf ? Json(nullptr) : Json(e.barrier_max);
  return j;
}

Json coal_replicate(const ExperimentConfig& cfg, std::uint64_t rep) {
  const Coord m = static_cast<Coord>(big_m_of(cfg));
  const Coord r = cfg.r;
  auto offset = [&](Coord t) { return floor_scaled_power(cfg.big_l, static_cast<double>(t), 2.0 / 3.0); };
  const WeightField f = field_of(cfg, rep);
  const SurfaceOptions o = surface_options(cfg);
  const Path g1 = geodesic(f, Vertex{r, r + offset(r)}, Vertex{m * r, m * r + offset(m * r)}, o);
  const Path g2 = geodesic(f, Vertex{r, r - offset(r)}, Vertex{m * r, m * r - offset(m * r)}, o);
  const auto c = coalescence_point(g1, g2);
  Json j = base_record(cfg, rep);
  j["r"] = r;
  j["M"] = m;
  j["L"] = cfg.big_l;
  j["coal"] = c.has_value();
  j["v_star"] = c ? to_json(c->v_star) : Json(nullptr);
  return j;
}

std::vector<double> column_of(const std::vector<Json>& records, const char* key, bool absolute) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const Json& r : records) {
    const double v = r.at(key).get<double>();
    out.push_back(absolute ? std::abs(v) : v);
  }
  return out;
}

Json moments(const std::vector<double>& v) {
  Json j;
  j["mean"] = mean(v);
  j["std"] = v.size() > 1 ? std::sqrt(variance(v)) : 0.0;
  return j;
}

Json fit_json(const ExponentFit& f) {
  return Json{{"slope", f.slope}, {"stderr", f.slope_se}, {"intercept", f.intercept}, {"rows", f.x.size()},
              {"weights", f.weights}};
}

template <class Fn>
Json try_fit(Fn fn) {
  try {
    return fit_json(fn());
  } catch (const InsufficientDataError& e) {
    return Json{{"error", e.what()}, {"insufficient", true}};
  }
}

bool strictly_decreasing(const TailTable& t) {
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (!(t.rows[i].p < t.rows[i - 1].p)) return false;
  }
  return true;
}

Json proportion(std::uint64_t s, std::uint64_t n) {
  const Interval ci = wilson_interval(s, n);
  return Json{{"successes", s}, {"trials", n}, {"p", n ? static_cast<double>(s) / static_cast<double>(n) : 0.0},
              {"lo", ci.lo}, {"hi", ci.hi}};
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, n] : kinds()) v.push_back(n);
    return v;
  }();
  return names;
}

ExperimentKind parse_experiment(const std::string& name) {
  for (const auto& [k, n] : kinds()) {
    if (n == name) return k;
  }
  std::string all;
  for (const auto& n : experiment_names()) all += (all.empty() ? "" : ", ") + n;
  throw ParameterError("unknown experiment '" + name + "' (expected one of " + all + ")");
}

std::string experiment_name(ExperimentKind kind) {
  for (const auto& [k, n] : kinds()) {
    if (k == kind) return n;
  }
  return "";
}

std::vector<double> effective_thresholds(const ExperimentConfig& cfg) {
  switch (parse_experiment(cfg.name)) {
    case ExperimentKind::kTwScaling:
      return cfg.s_list.empty() ? std::vector<double>{0.5, 1, 2, 3, 4} : cfg.s_list;
    case ExperimentKind::kTfExponent:
      return cfg.s_list.empty() ? std::vector<double>{0.25, 0.5, 1, 1.5, 2} : cfg.s_list;
    case ExperimentKind::kLocalTfTail:
      return cfg.s_list.empty() ? std::vector<double>{0.5, 1, 2, 3} : cfg.s_list;
    case ExperimentKind::kFiniteCoalescence:
      return cfg.r_list.empty() ? std::vector<double>{2, 4, 8, 16} : cfg.r_list;
    case ExperimentKind::kSemiInfiniteTail:
      return cfg.r_list.empty() ? std::vector<double>{1, 2, 4, 8, 16} : cfg.r_list;
    default:
      return {};
  }
}

Coord effective_n(const ExperimentConfig& cfg) {
  if (cfg.n) return *cfg.n;
  switch (parse_experiment(cfg.name)) {
    case ExperimentKind::kLocalTfTail:
      return 8192;
    case ExperimentKind::kFiniteCoalescence: {
      const auto rs = effective_thresholds(cfg);
      return static_cast<Coord>(std::ceil(64.0 * rs.back() * static_cast<double>(cfg.k)));
    }
    default:
      throw ParameterError("--n is required for " + cfg.name);
  }
}

void ExperimentConfig::validate() const {
  const ExperimentKind kind = parse_experiment(name);
  require(replicates >= 1, "replicates", "must be at least 1");
  require(threads >= 1 && threads <= 1024, "threads", "must lie in [1, 1024]");
  require(checkpoint_block >= 1, "checkpoint_block", "must be at least 1");
  require(!n || *n >= 2, "n", "must be at least 2");
  require(k >= 1, "k", "must be at least 1");
  require(r >= 1, "r", "must be at least 1");
  require(!big_m || (std::isfinite(*big_m) && *big_m > 0.0), "big_m", "must be positive");
  require(std::isfinite(slope) && slope > 0.0, "slope", "must be positive");
  require(std::isfinite(big_l) && big_l >= 0.0, "big_l", "must be nonnegative");
  require(ell >= 1, "ell", "must be at least 1");
  require(!window || *window >= 0, "window", "must be nonnegative");
  require(std::isfinite(big_s) && big_s > 0.0, "big_s", "must be positive");
  require(std::isfinite(h_const) && h_const > 0.0, "h_const", "must be positive");
  for (const auto* list : {&s_list, &r_list}) {
    require(std::is_sorted(list->begin(), list->end()), list == &s_list ? "s" : "r_list", "must be ascending");
    for (double v : *list) require(std::isfinite(v) && v > 0.0, list == &s_list ? "s" : "r_list", "must be positive");
  }
  scheme.validate();
  switch (kind) {
    case ExperimentKind::kTwScaling:
    case ExperimentKind::kTfExponent:
      if (!n) throw ParameterError("missing required --n for " + name);
      break;
    case ExperimentKind::kLocalTfTail:
      require(ell < effective_n(*this), "ell", "must be below n");
      break;
    case ExperimentKind::kBarrierEvents:
      build_spec(barrier_params(*this));
      break;
    case ExperimentKind::kCoalRM: {
      const double m = big_m_of(*this);
      require(m >= 2.0 && m == std::floor(m), "big_m", "must be an integer ratio of at least 2 for coal-rM");
      break;
    }
    default:
      break;
  }
}

Json config_to_json(const ExperimentConfig& cfg) {
  const ExperimentKind kind = parse_experiment(cfg.name);
  Json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["replicates"] = cfg.replicates;
  j["precision"] = cfg.precision == Precision::kSingle ? "single" : "double";
  j["checkpoint_block"] = cfg.checkpoint_block;
  const bool uses_n = kind == ExperimentKind::kTwScaling || kind == ExperimentKind::kTfExponent ||
                      kind == ExperimentKind::kLocalTfTail || kind == ExperimentKind::kFiniteCoalescence;
  j["n"] = uses_n && (cfg.n || kind == ExperimentKind::kLocalTfTail || kind == ExperimentKind::kFiniteCoalescence)
               ? Json(effective_n(cfg))
               : (cfg.n ? Json(*cfg.n) : Json(nullptr));
  j["k"] = cfg.k;
  j["r"] = cfg.r;
  j["big_m"] = big_m_of(cfg);
  const auto th = effective_thresholds(cfg);
  const bool r_based = kind == ExperimentKind::kFiniteCoalescence || kind == ExperimentKind::kSemiInfiniteTail;
  j["s"] = r_based ? cfg.s_list : th;
  j["r_list"] = r_based ? th : cfg.r_list;
  j["slope"] = cfg.slope;
  j["big_l"] = cfg.big_l;
  j["ell"] = cfg.ell;
  j["window"] = window_of(cfg);
  j["z"] = cfg.z;
  j["big_s"] = cfg.big_s;
  j["h_const"] = cfg.h_const;
  j["u0"] = cfg.u0;
  j["v0"] = cfg.v0;
  j["strict_above"] = cfg.strict_above;
  j["sensitivity"] = cfg.sensitivity;
  j["scheme"] = Json{{"target_factor", cfg.scheme.initial_target_factor},
                     {"max_doublings", cfg.scheme.max_doublings},
                     {"horizon", cfg.scheme.horizon}};
  return j;
}

void config_from_json(const Json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "name") c.name = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "replicates") c.replicates = v.get<std::uint64_t>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "precision") {
        const auto p = v.get<std::string>();
        if (p != "single" && p != "double") throw ParameterError("precision: expected single or double");
        c.precision = p == "single" ? Precision::kSingle : Precision::kDouble;
      } else if (key == "checkpoint_block") c.checkpoint_block = v.get<Coord>();
      else if (key == "n") c.n = v.is_null() ? std::nullopt : std::optional<Coord>(v.get<Coord>());
      else if (key == "k") c.k = v.get<Coord>();
      else if (key == "r") c.r = v.get<Coord>();
      else if (key == "big_m") c.big_m = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else if (key == "s") c.s_list = v.get<std::vector<double>>();
      else if (key == "r_list") c.r_list = v.get<std::vector<double>>();
      else if (key == "slope") c.slope = v.get<double>();
      else if (key == "big_l") c.big_l = v.get<double>();
      else if (key == "ell") c.ell = v.get<Coord>();
      else if (key == "window") c.window = v.is_null() ? std::nullopt : std::optional<Coord>(v.get<Coord>());
      else if (key == "z") c.z = v.get<Coord>();
      else if (key == "big_s") c.big_s = v.get<double>();
      else if (key == "h_const") c.h_const = v.get<double>();
      else if (key == "u0") c.u0 = v.get<double>();
      else if (key == "v0") c.v0 = v.get<double>();
      else if (key == "strict_above") c.strict_above = v.get<bool>();
      else if (key == "sensitivity") c.sensitivity = v.get<bool>();
      else if (key == "scheme") {
        for (const auto& [sk, sv] : v.items()) {
          if (sk == "target_factor") c.scheme.initial_target_factor = sv.get<Coord>();
          else if (sk == "max_doublings") c.scheme.max_doublings = sv.get<int>();
          else if (sk == "horizon") c.scheme.horizon = sv.get<Coord>();
          else throw ParameterError("unknown config key scheme." + sk);
        }
      } else {
        throw ParameterError("unknown config key " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
}

Json run_replicate(const ExperimentConfig& cfg, std::uint64_t rep) {
  switch (parse_experiment(cfg.name)) {
    case ExperimentKind::kTwScaling:
      return tw_replicate(cfg, rep);
    case ExperimentKind::kTfExponent: {
      const Coord n = effective_n(cfg);
      return tf_replicate(cfg, rep, n / 2, std::pow(static_cast<double>(n), 2.0 / 3.0));
    }
    case ExperimentKind::kLocalTfTail:
      return tf_replicate(cfg, rep, cfg.ell, std::pow(static_cast<double>(cfg.ell), 2.0 / 3.0));
    case ExperimentKind::kFiniteCoalescence:
      return finite_replicate(cfg, rep);
    case ExperimentKind::kSemiInfiniteTail:
      return semi_replicate(cfg, rep);
    case ExperimentKind::kBoundaryDensity:
      return boundary_replicate(cfg, rep);
    case ExperimentKind::kBarrierEvents:
      return barrier_replicate(cfg, rep);
    case ExperimentKind::kCoalRM:
      return coal_replicate(cfg, rep);
  }
  return {};
}

ExperimentResult summarize(const ExperimentConfig& cfg, std::vector<Json> records) {
  ExperimentResult res;
  res.config = config_to_json(cfg);
  res.records = std::move(records);
  const auto& recs = res.records;
  if (recs.empty()) throw InsufficientDataError("no records to summarize");
  const ExperimentKind kind = parse_experiment(cfg.name);
  const auto th = effective_thresholds(cfg);
  Json fit;
  fit["experiment"] = cfg.name;
  fit["replicates"] = recs.size();

  switch (kind) {
    case ExperimentKind::kTwScaling: {
      const auto t = column_of(recs, "T", false);
      const auto sc = column_of(recs, "scaled", false);
      res.tails = tail_table(column_of(recs, "scaled", true), th, TailKind::kGreaterEqual);
      const double n = static_cast<double>(effective_n(cfg));
      fit["n"] = effective_n(cfg);
      fit["T"] = moments(t);
      fit["mean_T_over_n"] = mean(t) / n;
      fit["scaled"] = moments(sc);
      fit["tail_fit"] = try_fit([&] { return fit_log_tail(*res.tails, [](double s) { return s; }); });
      res.plot_title = "P(|T - mu| >= s n^{1/3}) against s";
      break;
    }
    case ExperimentKind::kTfExponent:
    case ExperimentKind::kLocalTfTail: {
      res.tails = tail_table(column_of(recs, "scaled", true), th, TailKind::kGreaterEqual);
      fit["n"] = effective_n(cfg);
      fit["column"] = recs.front().at("column");
      fit["dev"] = moments(column_of(recs, "dev", false));
      fit["scaled"] = moments(column_of(recs, "scaled", false));
      fit["strictly_decreasing"] = strictly_decreasing(*res.tails);
      fit["gaussian_fit"] = try_fit([&] { return fit_log_tail(*res.tails, [](double s) { return s * s; }); });
      res.plot_title = "P(|gamma - column| >= s column^{2/3}) against s";
      break;
    }
    case ExperimentKind::kFiniteCoalescence: {
      std::vector<double> v1;
      std::vector<double> d;
      for (const Json& r : recs) {
        v1.push_back(r.at("v1").get<double>() / static_cast<double>(cfg.k));
        d.push_back(r.at("d").get<double>() / static_cast<double>(cfg.k));
      }
      res.tails = tail_table(v1, th, TailKind::kGreater);
      fit["k"] = cfg.k;
      fit["n"] = effective_n(cfg);
      fit["strictly_decreasing"] = strictly_decreasing(*res.tails);
      fit["power_law"] = try_fit([&] { return fit_power_law(*res.tails); });
      Json dt = Json::array();
      for (const TailRow& row : tail_table(d, th, TailKind::kGreater).rows) {
        dt.push_back(Json{{"R", row.threshold}, {"p", row.p}});
      }
      fit["d_tail"] = dt;
      if (cfg.sensitivity) {
        std::vector<double> v2n;
        for (const Json& r : recs) v2n.push_back(r.at("v1_2n").get<double>() / static_cast<double>(cfg.k));
        Json st = Json::array();
        for (const TailRow& row : tail_table(v2n, th, TailKind::kGreater).rows) {
          st.push_back(Json{{"R", row.threshold}, {"p", row.p}, {"lo", row.ci.lo}, {"hi", row.ci.hi}});
        }
        fit["tail_at_2n"] = st;
      }
      res.plot_title = "P(v*_1 > R k) against R";
      break;
    }
    case ExperimentKind::kSemiInfiniteTail: {
      std::vector<double> d;
      std::uint64_t unconverged = 0;
      for (const Json& r : recs) {
        if (!r.at("converged").get<bool>()) {
          ++unconverged;
          continue;
        }
        d.push_back(r.at("d").is_null() ? std::numeric_limits<double>::infinity()
                                        : r.at("d").get<double>() / static_cast<double>(cfg.k));
      }
      fit["k"] = cfg.k;
      fit["unconverged"] = unconverged;
      if (d.empty()) {
        fit["power_law"] = Json{{"error", "no converged replicates"}, {"insufficient", true}};
        break;
      }
      res.tails = tail_table(d, th, TailKind::kGreater);
      fit["strictly_decreasing"] = strictly_decreasing(*res.tails);
      fit["power_law"] = try_fit([&] { return fit_power_law(*res.tails); });
      res.plot_title = "P(d(v3, v4) > R k) against R";
      break;
    }
    case ExperimentKind::kBoundaryDensity: {
      std::uint64_t ones = 0, total = 0, unconverged = 0;
      for (const Json& r : recs) {
        if (!r.at("converged").get<bool>()) {
          ++unconverged;
          continue;
        }
        ones += r.at("ones").get<std::uint64_t>();
        total += r.at("bits").get<std::string>().size();
      }
      res.events.push_back(EventRow{"X=1", ones, total});
      const double scale = std::pow(static_cast<double>(cfg.k), 2.0 / 3.0);
      Json p = proportion(ones, total);
      fit["k"] = cfg.k;
      fit["unconverged"] = unconverged;
      fit["X"] = p;
      fit["scaled"] = p["p"].get<double>() * scale;
      fit["scaled_lo"] = p["lo"].get<double>() * scale;
      fit["scaled_hi"] = p["hi"].get<double>() * scale;
      break;
    }
    case ExperimentKind::kBarrierEvents: {
      const std::vector<std::string> flags{"G", "typical", "A1", "A2", "A3", "A_gamma", "R", "F_meet"};
      const std::vector<std::string> sub{"weight_shape", "weight_diagonal", "deviation_x",
                                         "deviation_mx", "deviation_x_prime", "inside_inner"};
      std::vector<std::uint64_t> counts(flags.size() + sub.size(), 0);
      std::uint64_t favourable = 0, violations = 0;
      const auto n = static_cast<std::uint64_t>(recs.size());
      for (const Json& r : recs) {
        const Json& f = r.at("flags");
        for (std::size_t i = 0; i < flags.size(); ++i) counts[i] += f.at(flags[i]).get<bool>();
        for (std::size_t i = 0; i < sub.size(); ++i) counts[flags.size() + i] += r.at("sub_flags").at(i).get<bool>();
        const bool fav = f.at("G").get<bool>() && f.at("typical").get<bool>() && f.at("A_gamma").get<bool>() &&
                         f.at("R").get<bool>();
        favourable += fav;
        violations += fav && !f.at("F_meet").get<bool>();
      }
      for (std::size_t i = 0; i < flags.size(); ++i) res.events.push_back(EventRow{flags[i], counts[i], n});
      for (std::size_t i = 0; i < sub.size(); ++i) res.events.push_back(EventRow{sub[i], counts[flags.size() + i], n});
      res.events.push_back(EventRow{"favourable", favourable, n});
      res.events.push_back(EventRow{"favourable_without_meet", violations, n});
      fit["z"] = cfg.z;
      fit["F_meet"] = proportion(counts[7], n);
      fit["favourable"] = favourable;
      fit["audit_violations"] = violations;
      break;
    }
    case ExperimentKind::kCoalRM: {
      std::uint64_t coal = 0;
      for (const Json& r : recs) coal += r.at("coal").get<bool>();
      const auto n = static_cast<std::uint64_t>(recs.size());
      res.events.push_back(EventRow{"Coal", coal, n});
      fit["r"] = cfg.r;
      fit["M"] = big_m_of(cfg);
      fit["L"] = cfg.big_l;
      fit["Coal"] = proportion(coal, n);
      break;
    }
  }
  res.fit = fit;
  return res;
}

void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& fn) {
  std::atomic<std::uint64_t> next{0};
  std::mutex m;
  std::uint64_t failed_at = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::uint64_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  const unsigned t = std::max(1U, static_cast<unsigned>(std::min<std::uint64_t>(threads, count)));
  if (t == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Json> records(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](std::uint64_t i) { records[i] = run_replicate(cfg, i); });
  return summarize(cfg, std::move(records));
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

}  // namespace

void write_results(const std::filesystem::path& dir, const ExperimentResult& res, RecordFormat format) {
  std::filesystem::create_directories(dir);
  open_out(dir / "cfg.json") << res.config.dump(2) << '\n';
  {
    auto out = open_out(dir / "records.jsonl");
    write_jsonl(out, res.records);
  }
  if (format == RecordFormat::kCsv) {
    auto out = open_out(dir / "records.csv");
    write_records_csv(out, res.records);
  }
  if (res.tails) {
    auto t = open_out(dir / "tails.csv");
    write_tails_csv(t, *res.tails);
    auto p = open_out(dir / "plot.dat");
    write_plot_dat(p, *res.tails, res.plot_title);
  }
  if (!res.events.empty()) {
    auto e = open_out(dir / "events.csv");
    write_events_csv(e, res.events);
  }
  open_out(dir / "fit.json") << res.fit.dump(2) << '\n';
}

ExperimentResult load_and_summarize(const std::filesystem::path& dir) {
  std::ifstream c(dir / "cfg.json");
  if (!c) throw ParameterError("no cfg.json in " + dir.string());
  ExperimentConfig cfg;
  try {
    config_from_json(Json::parse(c), cfg);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("cfg.json: ") + e.what());
  }
  std::ifstream r(dir / "records.jsonl");
  if (!r) throw ParameterError("no records.jsonl in " + dir.string());
  return summarize(cfg, read_jsonl(r));
}

}  // namespace lpp

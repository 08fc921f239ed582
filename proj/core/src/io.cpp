#include "lpp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "lpp/errors.hpp"

namespace lpp {

Json to_json(const Vertex& v) { return Json::array({v.x, v.y}); }

Json to_json(const FieldKey& key) { return Json{{"seed", key.seed}, {"replicate", key.replicate}}; }

Json to_json(const Path& path) {
  Json j;
  if (path.empty()) return j;
  j["start"] = to_json(path.front());
  j["end"] = to_json(path.back());
  j["steps"] = encode_steps(path.vertices);
  j["weight"] = path.weight;
  j["length"] = path.size();
  return j;
}

Json to_json(const CoalescenceRecord& rec) {
  Json j;
  j["d"] = rec.d ? Json(*rec.d) : Json(nullptr);
  j["v_star"] = rec.v_star ? to_json(*rec.v_star) : Json(nullptr);
  j["converged"] = rec.converged;
  j["target_N"] = rec.target_used.x;
  j["horizon"] = rec.horizon;
  return j;
}

Json to_json(const EventFlags& e) {
  Json flags{{"G", e.g},
             {"typical", e.typical.typical()},
             {"A1", e.path.a1},
             {"A2", e.path.a2},
             {"A3", e.path.a3},
             {"A_gamma", e.path.a_gamma()},
             {"R", e.r_gamma},
             {"F_meet", e.f_meet}};
  Json sub = Json::array();
  for (bool b : e.typical.as_array()) sub.push_back(b);
  return Json{{"flags", flags}, {"sub_flags", sub}};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_jsonl(std::ostream& out, const std::vector<Json>& records) {
  for (const Json& r : records) out << r.dump() << '\n';
}

std::vector<Json> read_jsonl(std::istream& in) {
  std::vector<Json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParameterError("records line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  std::string cell;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) cell += ';';
      cell += j[i].is_string() ? j[i].get<std::string>() : j[i].dump();
    }
  } else if (j.is_string()) {
    cell = j.get<std::string>();
  } else if (j.is_number_float()) {
    cell = format_double(j.get<double>());
  } else if (!j.is_null()) {
    cell = j.dump();
  }
  out.emplace_back(prefix, cell);
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<Json>& records) {
  std::vector<std::string> header;
  std::vector<std::vector<std::pair<std::string, std::string>>> rows;
  for (const Json& r : records) {
    rows.emplace_back();
    flatten(r, "", rows.back());
    for (const auto& [k, v] : rows.back()) {
      if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
    }
  }
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out << ',';
      for (const auto& [k, v] : row) {
        if (k == header[i]) {
          out << v;
          break;
        }
      }
    }
    out << '\n';
  }
}

void write_tails_csv(std::ostream& out, const TailTable& table) {
  out << "threshold,successes,trials,p,lo,hi\n";
  for (const TailRow& r : table.rows) {
    out << format_double(r.threshold) << ',' << r.successes << ',' << r.trials << ',' << format_double(r.p) << ','
        << format_double(r.ci.lo) << ',' << format_double(r.ci.hi) << '\n';
  }
}

void write_events_csv(std::ostream& out, const std::vector<EventRow>& rows) {
  out << "event,successes,trials,p,lo,hi\n";
  for (const EventRow& r : rows) {
    const double p = r.trials ? static_cast<double>(r.successes) / static_cast<double>(r.trials) : 0.0;
    const Interval ci = wilson_interval(r.successes, r.trials);
    out << r.name << ',' << r.successes << ',' << r.trials << ',' << format_double(p) << ',' << format_double(ci.lo)
        << ',' << format_double(ci.hi) << '\n';
  }
}

void write_plot_dat(std::ostream& out, const TailTable& table, const std::string& title) {
  out << "# " << title << '\n' << "# ln(threshold) ln(p)\n";
  for (const TailRow& r : table.rows) {
    if (r.p <= 0.0 || r.threshold <= 0.0) {
      out << "# " << format_double(r.threshold) << ' ' << format_double(r.p) << '\n';
      continue;
    }
    out << format_double(std::log(r.threshold)) << ' ' << format_double(std::log(r.p)) << '\n';
  }
}

}  // namespace lpp

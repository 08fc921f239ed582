#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpp/barrier.hpp"
#include "lpp/geometry.hpp"
#include "lpp/path.hpp"
#include "lpp/stats.hpp"

namespace lpp {

using Json = nlohmann::ordered_json;

Json to_json(const Vertex& v);
Json to_json(const FieldKey& key);
/// {start, end, steps, weight, length}.
Json to_json(const Path& path);
Json to_json(const CoalescenceRecord& rec);
/// {G, typical, A1, A2, A3, A_gamma, R, F_meet} plus the six typicality flags.
Json to_json(const EventFlags& flags);

/// Shortest round-trip decimal form ("%.17g" trimmed), used in CSV files.
std::string format_double(double v);

/// One compact JSON document per line.
void write_jsonl(std::ostream& out, const std::vector<Json>& records);
std::vector<Json> read_jsonl(std::istream& in);

/// Flattens objects with dotted keys; arrays become ';'-joined cells. The
/// header is the union of keys in first-seen order.
void write_records_csv(std::ostream& out, const std::vector<Json>& records);

/// threshold,successes,trials,p,lo,hi
void write_tails_csv(std::ostream& out, const TailTable& table);

struct EventRow {
  std::string name;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
};

/// event,successes,trials,p,lo,hi with Wilson intervals.
void write_events_csv(std::ostream& out, const std::vector<EventRow>& rows);

/// Two whitespace-separated columns ln(threshold) ln(p) with '#' headers;
/// rows with p = 0 or threshold <= 0 are kept as comments.
void write_plot_dat(std::ostream& out, const TailTable& table, const std::string& title);

}  // namespace lpp

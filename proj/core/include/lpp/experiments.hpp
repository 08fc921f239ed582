#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lpp/geometry.hpp"
#include "lpp/io.hpp"
#include "lpp/stats.hpp"
#include "lpp/surface.hpp"

namespace lpp {

enum class ExperimentKind {
  kTwScaling,
  kTfExponent,
  kLocalTfTail,
  kFiniteCoalescence,
  kSemiInfiniteTail,
  kBoundaryDensity,
  kBarrierEvents,
  kCoalRM,
};

const std::vector<std::string>& experiment_names();
/// ParameterError for unknown names.
ExperimentKind parse_experiment(const std::string& name);
std::string experiment_name(ExperimentKind kind);

/// Every knob of every experiment; fields a given experiment does not read
/// are ignored by it. Unset optionals take per-experiment defaults.
struct ExperimentConfig {
  std::string name = "tw-scaling";
  std::uint64_t seed = 1;
  std::uint64_t replicates = 100;
  unsigned threads = 1;
  Precision precision = Precision::kDouble;
  Coord checkpoint_block = 1024;

  std::optional<Coord> n;
  Coord k = 64;
  Coord r = 64;
  std::optional<double> big_m;  // barrier M (default 2) or the ratio M of Coal_{r,M} (default 64)
  std::vector<double> s_list;   // tail thresholds in units of the natural scale
  std::vector<double> r_list;   // multiples of k
  double slope = 1.0;           // endpoint (n, floor(slope n))
  double big_l = 1.0;
  Coord ell = 512;
  std::optional<Coord> window;  // boundary indices [-window, window]
  Coord z = 64;
  double big_s = 32.0;
  double h_const = 12.0;
  double u0 = 1.0;
  double v0 = 1.0;
  bool strict_above = true;
  bool sensitivity = true;      // finite coalescence: repeat each replicate with target 2n
  SemiInfiniteScheme scheme;

  /// ParameterError with the offending field named.
  void validate() const;
};

/// Config echo without `threads` (results must not depend on it).
Json config_to_json(const ExperimentConfig& cfg);
/// Unknown keys are rejected; missing keys keep the defaults already in `into`.
void config_from_json(const Json& j, ExperimentConfig& into);

/// Default thresholds for the experiment (s_list or r_list) when unset.
std::vector<double> effective_thresholds(const ExperimentConfig& cfg);
/// Default n when unset: 64 R_max k for finite coalescence, 8192 for the
/// local tail. Required (ParameterError) for tw-scaling and tf-exponent.
Coord effective_n(const ExperimentConfig& cfg);

struct ExperimentResult {
  Json config;
  std::vector<Json> records;  // replicate order
  std::optional<TailTable> tails;
  std::vector<EventRow> events;
  Json fit;
  std::string plot_title;
};

/// One replicate as a pure function of (cfg, replicate).
Json run_replicate(const ExperimentConfig& cfg, std::uint64_t replicate);

/// Aggregates replicate records into tails, events and the fit summary.
ExperimentResult summarize(const ExperimentConfig& cfg, std::vector<Json> records);

/// Runs every replicate on cfg.threads workers and merges in replicate order.
/// The first error by replicate index is rethrown.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

enum class RecordFormat { kJsonl, kCsv };

/// cfg.json, records.jsonl (plus records.csv for kCsv), tails.csv or
/// events.csv, fit.json and plot.dat (when there is a tail table).
void write_results(const std::filesystem::path& dir, const ExperimentResult& result,
                   RecordFormat format = RecordFormat::kJsonl);

/// Reads cfg.json and records.jsonl back from a results directory.
ExperimentResult load_and_summarize(const std::filesystem::path& dir);

/// Runs fn(i) for i in [0, count) on `threads` workers; the first exception by
/// index is rethrown after all workers finish.
void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& fn);

}  // namespace lpp

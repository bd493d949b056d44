#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ncl/stats.hpp"

namespace ncl {

// ---------------------------------------------------------------------------
// Experiment specs.
//
// A spec names a runner kind, a cartesian parameter grid, a trial count, and
// a base seed.  Every (grid point, trial) pair becomes one work item with a
// seed derived from the base seed and the item's flat index, so results never
// depend on scheduling.  Axis values an experiment treats as integers must be
// supplied as nonnegative whole numbers.
//
// Kinds, their required axes, and their optional axes (with defaults):
//   birthday-count        n, t          m=1048576, ell=2, y=0
//   classical-solve       n, n0         m=1048576, ell=2, y=0
//   segmented-capacity    n, s_bits, t_total
//                                       m=1048576, n0=4, ell=2, y=0,
//                                       fraction=0.9
//   oracle-equivalence    queries       m=2, n=2, w=1, r=1
//   capacity-vs-collision t             m=8, n0=16
//   quantum-toy           n, n0         m=32, ell=2, y=0, t1=12, k_cap=6,
//                                       t3=8
//   bounds-curve          (set by `curve`; see curve_registry below)
//
// JSON layout:
//   { "kind": "...", "grid": {"n": [1024, 2048], "t": 256, ...},
//     "trials": 200, "seed": 7, "out": "results/run1",
//     "curve": "...", "constant": 1.0 }
// Scalar grid entries are one-point axes.  `out` is the output stem for
// `<out>.csv` and `<out>.record.json`.  `curve` picks the bounds-curve
// evaluator; `constant` scales bound formulas (0 keeps each curve's own
// default leading constant).
struct ExperimentSpec {
  std::string kind;
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  uint64_t trials = 1;
  uint64_t seed = 0;
  std::string out;
  std::string curve;
  double constant = 0;
};

// Throws std::invalid_argument for unknown kinds, empty or unknown axes,
// missing required axes, zero trials, or a curve/kind mismatch.
void validate(const ExperimentSpec& spec);

void to_json(nlohmann::json& j, const ExperimentSpec& spec);
void from_json(const nlohmann::json& j, ExperimentSpec& spec);

ExperimentSpec load_spec(const std::string& path);

// Hash of the canonical (key-sorted) spec JSON, as 16 hex digits.
std::string spec_hash_hex(const ExperimentSpec& spec);

// One grid point with optional-axis defaults merged in: axis name -> value.
using GridPoint = std::map<std::string, double>;

// Cartesian product of the spec axes in name order, defaults included.
std::vector<GridPoint> grid_points(const ExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Results.

struct PointSummary {
  GridPoint point;
  std::map<std::string, double> stats;  // named aggregates for this point
  std::string headline;                 // stat the interval below refers to
  Interval ci;                          // undefined (flagged) when trials < 2
};

struct ResultRecord {
  std::string kind;
  std::string spec_hash;
  std::string sweep_axis;  // first axis taking several values, else the first
  std::vector<std::string> columns;  // axis names, then "trial", then metrics
  std::vector<std::vector<double>> rows;    // trials x grid points, item order
  std::vector<PointSummary> aggregates;     // one per grid point
  double wallclock_sec = 0;
};

// Runs all work items on a small thread pool (size from the NCL_WORKERS
// environment variable, default hardware concurrency) and assembles rows and
// aggregates single-threaded; output is identical for any worker count.
ResultRecord run_experiment(const ExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Persistence.  The rows CSV starts with the schema line "# ncl.rows.v1",
// then a column-name line, then one line per row; loaders reject any other
// schema line.  The record JSON carries version "ncl.record.v1" with the
// spec, hash, rows, and aggregates.

inline constexpr const char* rows_schema = "# ncl.rows.v1";
inline constexpr const char* record_schema = "ncl.record.v1";
inline constexpr const char* plot_schema = "# ncl.plot.v1";

std::string rows_csv(const ResultRecord& record);
void write_rows_csv(const std::string& path, const ResultRecord& record);

struct RowsCsv {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
RowsCsv parse_rows_csv(const std::string& text);
RowsCsv load_rows_csv(const std::string& path);

nlohmann::json record_to_json(const ExperimentSpec& spec,
                              const ResultRecord& record);

struct StoredRecord {
  ExperimentSpec spec;
  ResultRecord record;
};
StoredRecord record_from_json(const nlohmann::json& j);
StoredRecord load_record(const std::string& path);

// Writes "<spec.out>.csv" and "<spec.out>.record.json"; throws when the spec
// has no output stem.  Returns the two paths written.
std::pair<std::string, std::string> write_outputs(const ExperimentSpec& spec,
                                                  const ResultRecord& record);

// ---------------------------------------------------------------------------
// Closed-form curves, used both as the bounds-curve runner and as plot
// overlays.  Each curve reads named parameters off a grid point and returns
// a value plus a regime flag.

struct CurveInfo {
  std::vector<std::string> needs;  // grid-point parameters the curve reads
  double default_c = 1.0;          // used when the requested constant is 0
  std::function<std::pair<double, bool>(const GridPoint&, double c)> eval;
};

// Keys: classical-lower-t, quantum-lower-t, classical-upper-t,
// quantum-upper-t, segmented-capacity-bound, tail-bound,
// collision-capacity-bound (fresh-cell schedule, running mean (t+1)/2).
const std::map<std::string, CurveInfo>& curve_registry();

struct OverlayCurve {
  std::string name;
  double constant = 0;  // 0 = the curve's default leading constant
};

// Parses "name" or "name:c=<value>"; throws on unknown names.
OverlayCurve parse_overlay(const std::string& text);

// Long-format plot CSV ("# ncl.plot.v1", an x-axis comment, "series,x,y"):
// one series per aggregate statistic and one per overlay, x taken from the
// record's sweep axis.  Throws when an overlay needs a parameter the record
// grid does not carry, naming the overlay's axis and the record's axes.
std::string plotdata_csv(const StoredRecord& stored,
                         const std::vector<OverlayCurve>& overlays);

// Worker-pool size: NCL_WORKERS when set (clamped to >= 1), otherwise
// hardware concurrency.
unsigned worker_count();

}  // namespace ncl

#include "ncl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ncl/bounds.hpp"
#include "ncl/classical.hpp"
#include "ncl/oracle.hpp"
#include "ncl/prf.hpp"
#include "ncl/quantum/oracles.hpp"
#include "ncl/quantum/qsolver.hpp"
#include "ncl/quantum/sparse.hpp"
#include "ncl/quantum/state.hpp"
#include "ncl/tuples.hpp"

namespace ncl {
namespace {

std::string fmt_num(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 4.0e18)
    return std::to_string(static_cast<long long>(v));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

double real_axis(const GridPoint& pt, const char* name) {
  auto it = pt.find(name);
  if (it == pt.end())
    throw std::invalid_argument(std::string("missing axis '") + name + "'");
  return it->second;
}

uint64_t int_axis(const GridPoint& pt, const char* name) {
  double v = real_axis(pt, name);
  if (!(v >= 0) || v != std::floor(v) || v >= 1.8e19)
    throw std::invalid_argument(std::string("axis '") + name +
                                "' must be a nonnegative integer (got " +
                                fmt_num(v) + ")");
  return static_cast<uint64_t>(v);
}

// Static description of a runner kind: which axes it understands and the
// metric columns each trial produces.
struct KindSpec {
  std::vector<std::string> required;
  std::map<std::string, double> defaults;
  std::vector<std::string> metrics;
};

const std::map<std::string, KindSpec>& kind_registry() {
  static const std::map<std::string, KindSpec> reg = {
      {"birthday-count",
       {{"n", "t"},
        {{"m", 1048576}, {"ell", 2}, {"y", 0}},
        {"count"}}},
      {"classical-solve",
       {{"n", "n0"},
        {{"m", 1048576}, {"ell", 2}, {"y", 0}},
        {"success", "queries", "t1", "t2", "tuples"}}},
      {"segmented-capacity",
       {{"n", "s_bits", "t_total"},
        {{"m", 1048576}, {"n0", 4}, {"ell", 2}, {"y", 0}, {"fraction", 0.9}},
        {"capacity", "set_bits", "invalid_bits", "undeclared_bits", "aborted",
         "queries"}}},
      {"oracle-equivalence",
       {{"queries"},
        {{"m", 2}, {"n", 2}, {"w", 1}, {"r", 1}},
        {"tv"}}},
      {"capacity-vs-collision",
       {{"t"},
        {{"m", 8}, {"n0", 16}},
        {"success", "v_mean", "bound"}}},
      {"quantum-toy",
       {{"n", "n0"},
        {{"m", 32}, {"ell", 2}, {"y", 0}, {"t1", 12}, {"k_cap", 6}, {"t3", 8}},
        {"success", "success_prob", "early_exit", "iterations", "queries"}}},
      {"bounds-curve", {{}, {}, {"value", "regime_ok"}}},
  };
  return reg;
}

std::vector<std::string> known_kinds() {
  std::vector<std::string> out;
  for (const auto& [name, info] : kind_registry()) out.push_back(name);
  return out;
}

std::vector<std::string> known_curves() {
  std::vector<std::string> out;
  for (const auto& [name, info] : curve_registry()) out.push_back(name);
  return out;
}

// Axes the spec may set: the kind's own, or for bounds-curve whatever the
// chosen curve reads.
void spec_axis_sets(const ExperimentSpec& spec, std::vector<std::string>& req,
                    std::map<std::string, double>& defs) {
  const KindSpec& ks = kind_registry().at(spec.kind);
  req = ks.required;
  defs = ks.defaults;
  if (spec.kind == "bounds-curve") req = curve_registry().at(spec.curve).needs;
}

double resolve_constant(const CurveInfo& info, double requested) {
  return requested == 0 ? info.default_c : requested;
}

// Sorted unique axis list with defaults merged in as one-point axes.
std::vector<std::pair<std::string, std::vector<double>>> merged_axes(
    const ExperimentSpec& spec) {
  std::vector<std::string> req;
  std::map<std::string, double> defs;
  spec_axis_sets(spec, req, defs);
  std::map<std::string, std::vector<double>> merged;
  for (const auto& [name, values] : spec.axes) merged[name] = values;
  for (const auto& [name, value] : defs)
    if (!merged.count(name)) merged[name] = {value};
  return {merged.begin(), merged.end()};
}

// ---------------------------------------------------------------------------
// Per-trial runners.  Every runner derives any randomness it needs from the
// trial seed alone.

std::vector<double> run_birthday(const GridPoint& pt, uint64_t ts) {
  uint64_t m = int_axis(pt, "m"), n = int_axis(pt, "n");
  uint64_t t = int_axis(pt, "t"), y = int_axis(pt, "y");
  auto ell = static_cast<uint32_t>(int_axis(pt, "ell"));
  if (t > m)
    throw std::invalid_argument("birthday-count: axis 't' must not exceed 'm'");
  OracleParams p{m, n, 2, ell, y, derive_seed(ts, 1)};
  OracleInstance inst = OracleInstance::make(p);
  std::vector<uint64_t> vals(t);
  for (uint64_t i = 0; i < t; ++i) vals[i] = inst.h_at(i);
  std::vector<uint64_t> counts = same_sum_counts(vals, n, ell);
  return {double(counts[y])};
}

std::vector<double> run_classical(const GridPoint& pt, uint64_t ts) {
  OracleParams p{int_axis(pt, "m"), int_axis(pt, "n"), int_axis(pt, "n0"),
                 static_cast<uint32_t>(int_axis(pt, "ell")), int_axis(pt, "y"),
                 derive_seed(ts, 1)};
  OracleInstance inst = OracleInstance::make(p);
  SolverConfig cfg = derive_config(p, derive_seed(ts, 2));
  SolverReport rep = solve_unbounded(inst, cfg);
  return {rep.success ? 1.0 : 0.0, double(rep.ledger.total_queries()),
          double(rep.t1), double(rep.t2), double(rep.tuples_found)};
}

std::vector<double> run_segmented_trial(const GridPoint& pt, uint64_t ts) {
  OracleParams p{int_axis(pt, "m"), int_axis(pt, "n"), int_axis(pt, "n0"),
                 static_cast<uint32_t>(int_axis(pt, "ell")), int_axis(pt, "y"),
                 derive_seed(ts, 1)};
  OracleInstance inst = OracleInstance::make(p);
  SegmentPlan plan =
      make_segment_plan(int_axis(pt, "t_total"), int_axis(pt, "s_bits"), p);
  FlipMemory mem(p.n0, derive_seed(ts, 3));
  RestartStrategy strat(derive_seed(ts, 2), plan.segments,
                        real_axis(pt, "fraction"));
  SegmentedReport rep = run_segmented(inst, mem, strat, plan);
  return {double(rep.capacity),        double(rep.set_bits_total),
          double(rep.invalid_bits),    double(rep.undeclared_bits),
          rep.aborted ? 1.0 : 0.0,     double(rep.ledger.total_queries())};
}

std::vector<double> run_equivalence(const GridPoint& pt, uint64_t ts) {
  q::RegisterLayout l{int_axis(pt, "m"), int_axis(pt, "n"), int_axis(pt, "w"),
                      int_axis(pt, "r"), q::DbMode::standard};
  q::Circuit c = q::random_circuit(int_axis(pt, "queries"), ts);
  return {q::equivalence_tv(l, c)};
}

std::vector<double> run_capacity(const GridPoint& pt, uint64_t) {
  q::CapacityPoint cp = q::capacity_vs_collision(
      int_axis(pt, "m"), int_axis(pt, "n0"), int_axis(pt, "t"));
  return {cp.success, cp.v_mean, cp.bound};
}

std::vector<double> run_quantum_toy(const GridPoint& pt, uint64_t ts) {
  OracleParams p{int_axis(pt, "m"), int_axis(pt, "n"), int_axis(pt, "n0"),
                 static_cast<uint32_t>(int_axis(pt, "ell")), int_axis(pt, "y"),
                 derive_seed(ts, 1)};
  OracleInstance inst = OracleInstance::make(p);
  q::QSolverConfig cfg{int_axis(pt, "t1"), int_axis(pt, "k_cap"),
                       int_axis(pt, "t3"), derive_seed(ts, 2)};
  q::QSolverReport rep = q::quantum_toy_solve(inst, cfg);
  return {rep.success ? 1.0 : 0.0, rep.success_prob,
          rep.early_exit ? 1.0 : 0.0, double(rep.iterations),
          double(rep.ledger.total_queries())};
}

std::vector<double> run_bounds_curve(const ExperimentSpec& spec,
                                     const GridPoint& pt) {
  const CurveInfo& info = curve_registry().at(spec.curve);
  auto [value, ok] = info.eval(pt, resolve_constant(info, spec.constant));
  return {value, ok ? 1.0 : 0.0};
}

std::vector<double> run_trial(const ExperimentSpec& spec, const GridPoint& pt,
                              uint64_t ts) {
  if (spec.kind == "birthday-count") return run_birthday(pt, ts);
  if (spec.kind == "classical-solve") return run_classical(pt, ts);
  if (spec.kind == "segmented-capacity") return run_segmented_trial(pt, ts);
  if (spec.kind == "oracle-equivalence") return run_equivalence(pt, ts);
  if (spec.kind == "capacity-vs-collision") return run_capacity(pt, ts);
  if (spec.kind == "quantum-toy") return run_quantum_toy(pt, ts);
  if (spec.kind == "bounds-curve") return run_bounds_curve(spec, pt);
  throw std::invalid_argument("unknown experiment kind '" + spec.kind + "'");
}

// ---------------------------------------------------------------------------
// Aggregation.

Interval normal_interval(const RunningStats& rs, double z = 1.96) {
  Interval iv;
  if (rs.n < 2) return iv;
  double half = z * rs.stderr_mean();
  iv.lo = rs.mean - half;
  iv.hi = rs.mean + half;
  iv.defined = true;
  return iv;
}

PointSummary summarize_point(const ExperimentSpec& spec, const GridPoint& pt,
                             const std::vector<std::vector<double>>& rows,
                             size_t first_row, size_t metric_off) {
  const uint64_t trials = spec.trials;
  auto metric = [&](size_t k) {
    std::vector<double> v(trials);
    for (uint64_t t = 0; t < trials; ++t)
      v[t] = rows[first_row + t][metric_off + k];
    return v;
  };
  auto welford = [](const std::vector<double>& v) {
    RunningStats rs;
    for (double x : v) rs.add(x);
    return rs;
  };
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  };
  auto successes = [](const std::vector<double>& v) {
    uint64_t s = 0;
    for (double x : v) s += x != 0;
    return s;
  };

  PointSummary s;
  s.point = pt;
  if (spec.kind == "birthday-count") {
    std::vector<double> c = metric(0);
    RunningStats rs = welford(c);
    double expected =
        binom(int_axis(pt, "t"), static_cast<uint32_t>(int_axis(pt, "ell"))) /
        double(int_axis(pt, "n"));
    uint64_t low = 0;
    for (double x : c) low += x <= expected / 2;
    s.stats["count.mean"] = rs.mean;
    s.stats["count.variance"] = rs.variance();
    s.stats["expected_mean"] = expected;
    s.stats["tail_freq"] = double(low) / double(trials);
    s.headline = "count.mean";
    s.ci = normal_interval(rs);
  } else if (spec.kind == "classical-solve") {
    std::vector<double> succ = metric(0), queries = metric(1);
    s.stats["success_rate"] = double(successes(succ)) / double(trials);
    s.stats["queries.mean"] = welford(queries).mean;
    s.stats["queries.median"] = median(queries);
    s.stats["t1.mean"] = welford(metric(2)).mean;
    s.stats["t2.mean"] = welford(metric(3)).mean;
    s.stats["tuples.mean"] = welford(metric(4)).mean;
    s.headline = "success_rate";
    s.ci = wilson_interval(successes(succ), trials);
  } else if (spec.kind == "segmented-capacity") {
    RunningStats cap = welford(metric(0));
    s.stats["capacity.mean"] = cap.mean;
    s.stats["capacity.variance"] = cap.variance();
    s.stats["set_bits.mean"] = welford(metric(1)).mean;
    s.stats["invalid_bits.mean"] = welford(metric(2)).mean;
    s.stats["undeclared_bits.mean"] = welford(metric(3)).mean;
    s.stats["abort_rate"] = double(successes(metric(4))) / double(trials);
    s.stats["queries.mean"] = welford(metric(5)).mean;
    s.stats["bound"] = bounds::segmented_capacity_bound(
        double(int_axis(pt, "s_bits")), double(int_axis(pt, "t_total")),
        static_cast<uint32_t>(int_axis(pt, "ell")), double(int_axis(pt, "n")),
        spec.constant == 0 ? 1.0 : spec.constant);
    s.headline = "capacity.mean";
    s.ci = normal_interval(cap);
  } else if (spec.kind == "oracle-equivalence") {
    std::vector<double> tv = metric(0);
    RunningStats rs = welford(tv);
    s.stats["tv.mean"] = rs.mean;
    s.stats["tv.max"] = *std::max_element(tv.begin(), tv.end());
    s.headline = "tv.mean";
    s.ci = normal_interval(rs);
  } else if (spec.kind == "capacity-vs-collision") {
    RunningStats succ = welford(metric(0));
    s.stats["success"] = succ.mean;
    s.stats["v_mean"] = welford(metric(1)).mean;
    s.stats["bound"] = welford(metric(2)).mean;
    s.stats["margin"] = s.stats["bound"] - s.stats["success"];
    s.headline = "success";
    s.ci = normal_interval(succ);
  } else if (spec.kind == "quantum-toy") {
    std::vector<double> succ = metric(0);
    s.stats["success_rate"] = double(successes(succ)) / double(trials);
    s.stats["success_prob.mean"] = welford(metric(1)).mean;
    s.stats["early_rate"] = double(successes(metric(2))) / double(trials);
    s.stats["iterations.mean"] = welford(metric(3)).mean;
    s.stats["queries.mean"] = welford(metric(4)).mean;
    s.headline = "success_rate";
    s.ci = wilson_interval(successes(succ), trials);
  } else {  // bounds-curve
    RunningStats val = welford(metric(0));
    s.stats["value"] = val.mean;
    s.stats["regime_ok"] = welford(metric(1)).mean;
    s.headline = "value";
    s.ci = normal_interval(val);
  }
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec handling.

void validate(const ExperimentSpec& spec) {
  if (!kind_registry().count(spec.kind))
    throw std::invalid_argument("unknown experiment kind '" + spec.kind +
                                "' (known: " + join(known_kinds(), ", ") + ")");
  if (spec.trials == 0)
    throw std::invalid_argument("experiment needs at least one trial");
  if (spec.kind == "bounds-curve") {
    if (!curve_registry().count(spec.curve))
      throw std::invalid_argument("bounds-curve needs a known curve (known: " +
                                  join(known_curves(), ", ") + "), got '" +
                                  spec.curve + "'");
  } else if (!spec.curve.empty()) {
    throw std::invalid_argument("'curve' only applies to bounds-curve specs");
  }
  if (spec.constant < 0)
    throw std::invalid_argument("'constant' must be nonnegative");

  std::vector<std::string> req;
  std::map<std::string, double> defs;
  spec_axis_sets(spec, req, defs);

  std::map<std::string, size_t> seen;
  for (const auto& [name, values] : spec.axes) {
    if (seen.count(name))
      throw std::invalid_argument("axis '" + name + "' appears twice");
    seen[name] = values.size();
    bool allowed = defs.count(name) ||
                   std::find(req.begin(), req.end(), name) != req.end();
    if (!allowed) {
      std::vector<std::string> takes = req;
      for (const auto& [d, v] : defs) takes.push_back(d);
      std::sort(takes.begin(), takes.end());
      throw std::invalid_argument("experiment kind '" + spec.kind +
                                  "' does not take axis '" + name +
                                  "' (takes: " + join(takes, ", ") + ")");
    }
    if (values.empty())
      throw std::invalid_argument("axis '" + name + "' has no values");
    for (double v : values)
      if (!std::isfinite(v))
        throw std::invalid_argument("axis '" + name +
                                    "' has a non-finite value");
  }
  for (const std::string& name : req)
    if (!seen.count(name))
      throw std::invalid_argument("experiment kind '" + spec.kind +
                                  (spec.kind == "bounds-curve"
                                       ? "' with curve '" + spec.curve
                                       : std::string("'")) +
                                  " needs axis '" + name + "'");
}

void to_json(nlohmann::json& j, const ExperimentSpec& spec) {
  nlohmann::json grid = nlohmann::json::object();
  for (const auto& [name, values] : spec.axes) grid[name] = values;
  j = nlohmann::json{{"kind", spec.kind},     {"grid", grid},
                     {"trials", spec.trials}, {"seed", spec.seed},
                     {"out", spec.out},       {"curve", spec.curve},
                     {"constant", spec.constant}};
}

void from_json(const nlohmann::json& j, ExperimentSpec& spec) {
  spec = ExperimentSpec{};
  spec.kind = j.at("kind").get<std::string>();
  const nlohmann::json& grid = j.at("grid");
  if (!grid.is_object())
    throw std::invalid_argument("'grid' must be an object of axes");
  for (const auto& [name, value] : grid.items()) {
    std::vector<double> values;
    if (value.is_array()) {
      for (const auto& v : value) {
        if (!v.is_number())
          throw std::invalid_argument("axis '" + name +
                                      "' must hold numbers only");
        values.push_back(v.get<double>());
      }
    } else if (value.is_number()) {
      values.push_back(value.get<double>());
    } else {
      throw std::invalid_argument("axis '" + name +
                                  "' must be a number or array of numbers");
    }
    spec.axes.emplace_back(name, std::move(values));
  }
  spec.trials = j.value("trials", uint64_t{1});
  spec.seed = j.value("seed", uint64_t{0});
  spec.out = j.value("out", std::string{});
  spec.curve = j.value("curve", std::string{});
  spec.constant = j.value("constant", 0.0);
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read spec file '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in);
  auto spec = j.get<ExperimentSpec>();
  validate(spec);
  return spec;
}

std::string spec_hash_hex(const ExperimentSpec& spec) {
  nlohmann::json j = spec;
  std::string dump = j.dump();
  uint64_t h = siphash24(0x6e636c2e73706563ULL, 0x2e686173682e7631ULL,
                         reinterpret_cast<const uint8_t*>(dump.data()),
                         dump.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<GridPoint> grid_points(const ExperimentSpec& spec) {
  validate(spec);
  auto axes = merged_axes(spec);
  size_t total = 1;
  for (const auto& [name, values] : axes) total *= values.size();
  std::vector<GridPoint> pts;
  pts.reserve(total);
  for (size_t idx = 0; idx < total; ++idx) {
    GridPoint pt;
    size_t rest = idx;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      pt[it->first] = it->second[rest % it->second.size()];
      rest /= it->second.size();
    }
    pts.push_back(std::move(pt));
  }
  return pts;
}

unsigned worker_count() {
  if (const char* s = std::getenv("NCL_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v >= 1)
      return static_cast<unsigned>(std::min(v, 256L));
    return 1;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

ResultRecord run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<GridPoint> pts = grid_points(spec);
  const auto axes = merged_axes(spec);
  const KindSpec& ks = kind_registry().at(spec.kind);
  const size_t total = pts.size() * spec.trials;

  ResultRecord rec;
  rec.kind = spec.kind;
  rec.spec_hash = spec_hash_hex(spec);
  for (const auto& [name, values] : axes) {
    rec.columns.push_back(name);
    if (values.size() > 1 && rec.sweep_axis.empty()) rec.sweep_axis = name;
  }
  if (rec.sweep_axis.empty()) rec.sweep_axis = axes.front().first;
  rec.columns.push_back("trial");
  rec.columns.insert(rec.columns.end(), ks.metrics.begin(), ks.metrics.end());
  rec.rows.assign(total, {});

  // Work items are (grid point, trial) pairs; each derives its seed from its
  // flat index, so neither worker count nor scheduling affects any row.
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto work = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= total || failed.load()) return;
      const size_t gp = i / spec.trials;
      const uint64_t trial = i % spec.trials;
      try {
        std::vector<double> metrics =
            run_trial(spec, pts[gp], derive_seed(spec.seed, i));
        std::vector<double>& row = rec.rows[i];
        row.reserve(rec.columns.size());
        for (const auto& [name, value] : pts[gp]) row.push_back(value);
        row.push_back(double(trial));
        row.insert(row.end(), metrics.begin(), metrics.end());
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  const unsigned workers =
      std::min<size_t>(worker_count(), std::max<size_t>(total, 1));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  for (size_t gp = 0; gp < pts.size(); ++gp)
    rec.aggregates.push_back(summarize_point(spec, pts[gp], rec.rows,
                                             gp * spec.trials,
                                             axes.size() + 1));
  rec.wallclock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

// ---------------------------------------------------------------------------
// Persistence.

std::string rows_csv(const ResultRecord& record) {
  std::string out = std::string(rows_schema) + "\n" +
                    join(record.columns, ",") + "\n";
  for (const auto& row : record.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += fmt_num(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_rows_csv(const std::string& path, const ResultRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << rows_csv(record);
}

RowsCsv parse_rows_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != rows_schema)
    throw std::runtime_error("unsupported rows schema \"" + line +
                             "\" (expected \"" + rows_schema + "\")");
  RowsCsv out;
  if (!std::getline(in, line))
    throw std::runtime_error("rows CSV is missing its column header");
  out.columns = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != out.columns.size())
      throw std::runtime_error("rows CSV line has " +
                               std::to_string(fields.size()) + " fields, " +
                               "expected " +
                               std::to_string(out.columns.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) {
      char* end = nullptr;
      double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0')
        throw std::runtime_error("rows CSV has a non-numeric field '" + f +
                                 "'");
      row.push_back(v);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

RowsCsv load_rows_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rows_csv(buf.str());
}

nlohmann::json record_to_json(const ExperimentSpec& spec,
                              const ResultRecord& record) {
  nlohmann::json aggs = nlohmann::json::array();
  for (const PointSummary& s : record.aggregates) {
    nlohmann::json ci{{"defined", s.ci.defined}};
    if (s.ci.defined) {
      ci["lo"] = s.ci.lo;
      ci["hi"] = s.ci.hi;
    }
    aggs.push_back(nlohmann::json{{"point", s.point},
                                  {"stats", s.stats},
                                  {"headline", s.headline},
                                  {"ci", ci}});
  }
  return nlohmann::json{{"version", record_schema},
                        {"kind", record.kind},
                        {"spec", spec},
                        {"spec_hash", record.spec_hash},
                        {"sweep_axis", record.sweep_axis},
                        {"columns", record.columns},
                        {"rows", record.rows},
                        {"aggregates", aggs},
                        {"wallclock_sec", record.wallclock_sec}};
}

StoredRecord record_from_json(const nlohmann::json& j) {
  std::string version = j.value("version", std::string{});
  if (version != record_schema)
    throw std::runtime_error("unsupported record version \"" + version +
                             "\" (expected \"" + record_schema + "\")");
  StoredRecord out;
  out.spec = j.at("spec").get<ExperimentSpec>();
  out.record.kind = j.at("kind").get<std::string>();
  out.record.spec_hash = j.at("spec_hash").get<std::string>();
  out.record.sweep_axis = j.at("sweep_axis").get<std::string>();
  out.record.columns = j.at("columns").get<std::vector<std::string>>();
  out.record.rows = j.at("rows").get<std::vector<std::vector<double>>>();
  for (const auto& a : j.at("aggregates")) {
    PointSummary s;
    s.point = a.at("point").get<GridPoint>();
    s.stats = a.at("stats").get<std::map<std::string, double>>();
    s.headline = a.at("headline").get<std::string>();
    const auto& ci = a.at("ci");
    s.ci.defined = ci.at("defined").get<bool>();
    if (s.ci.defined) {
      s.ci.lo = ci.at("lo").get<double>();
      s.ci.hi = ci.at("hi").get<double>();
    }
    out.record.aggregates.push_back(std::move(s));
  }
  out.record.wallclock_sec = j.value("wallclock_sec", 0.0);
  return out;
}

StoredRecord load_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read record file '" + path + "'");
  return record_from_json(nlohmann::json::parse(in));
}

std::pair<std::string, std::string> write_outputs(const ExperimentSpec& spec,
                                                  const ResultRecord& record) {
  if (spec.out.empty())
    throw std::invalid_argument("spec has no output stem ('out')");
  std::filesystem::path stem(spec.out);
  if (stem.has_parent_path())
    std::filesystem::create_directories(stem.parent_path());
  std::string csv_path = spec.out + ".csv";
  std::string record_path = spec.out + ".record.json";
  write_rows_csv(csv_path, record);
  std::ofstream out(record_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + record_path + "'");
  out << record_to_json(spec, record).dump(2) << "\n";
  return {csv_path, record_path};
}

// ---------------------------------------------------------------------------
// Closed-form curves and plot output.

const std::map<std::string, CurveInfo>& curve_registry() {
  static const std::map<std::string, CurveInfo> reg = [] {
    std::map<std::string, CurveInfo> r;
    auto as_pair = [](bounds::BoundValue b) {
      return std::pair<double, bool>{b.value, b.regime_ok};
    };
    r["classical-lower-t"] = {
        {"n", "n0", "ell", "s"},
        1.0,
        [as_pair](const GridPoint& p, double c) {
          return as_pair(bounds::classical_lower_T(
              real_axis(p, "n"), real_axis(p, "n0"),
              static_cast<uint32_t>(int_axis(p, "ell")), real_axis(p, "s"),
              c));
        }};
    r["quantum-lower-t"] = {
        {"n", "n0", "ell", "s"},
        1.0,
        [as_pair](const GridPoint& p, double c) {
          return as_pair(bounds::quantum_lower_T(
              real_axis(p, "n"), real_axis(p, "n0"),
              static_cast<uint32_t>(int_axis(p, "ell")), real_axis(p, "s"),
              c));
        }};
    r["classical-upper-t"] = {
        {"n", "n0", "ell"},
        1.0,
        [as_pair](const GridPoint& p, double c) {
          return as_pair(bounds::classical_upper_T(
              real_axis(p, "n"), real_axis(p, "n0"),
              static_cast<uint32_t>(int_axis(p, "ell")), c));
        }};
    r["quantum-upper-t"] = {
        {"n", "n0", "ell"},
        1.0,
        [as_pair](const GridPoint& p, double c) {
          return as_pair(bounds::quantum_upper_T(
              real_axis(p, "n"), real_axis(p, "n0"),
              static_cast<uint32_t>(int_axis(p, "ell")), c));
        }};
    r["segmented-capacity-bound"] = {
        {"n", "ell", "s_bits", "t_total"},
        1.0,
        [](const GridPoint& p, double c) {
          return std::pair<double, bool>{
              bounds::segmented_capacity_bound(
                  real_axis(p, "s_bits"), real_axis(p, "t_total"),
                  static_cast<uint32_t>(int_axis(p, "ell")),
                  real_axis(p, "n"), c),
              true};
        }};
    r["tail-bound"] = {
        {"n", "ell", "t", "k"},
        1.0,
        [](const GridPoint& p, double c) {
          return std::pair<double, bool>{
              bounds::classical_tail_bound(real_axis(p, "t"), real_axis(p, "k"),
                                   static_cast<uint32_t>(int_axis(p, "ell")),
                                   real_axis(p, "n"), c),
              true};
        }};
    // The running database-size mean of the fresh-cell query schedule is
    // (t+1)/2 exactly, so the ceiling closes over t and n0 alone.
    r["collision-capacity-bound"] = {
        {"n0", "t"},
        20.0,
        [](const GridPoint& p, double c) {
          double t = real_axis(p, "t");
          return std::pair<double, bool>{
              bounds::collision_capacity_bound(t, (t + 1) / 2, real_axis(p, "n0"), c),
              true};
        }};
    return r;
  }();
  return reg;
}

OverlayCurve parse_overlay(const std::string& text) {
  OverlayCurve o;
  std::string::size_type colon = text.find(':');
  o.name = text.substr(0, colon);
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    if (rest.rfind("c=", 0) != 0)
      throw std::invalid_argument("bad overlay spec '" + text +
                                  "' (expected name[:c=<value>])");
    char* end = nullptr;
    o.constant = std::strtod(rest.c_str() + 2, &end);
    if (end == rest.c_str() + 2 || *end != '\0' || !(o.constant > 0))
      throw std::invalid_argument("bad overlay constant in '" + text + "'");
  }
  if (!curve_registry().count(o.name))
    throw std::invalid_argument("unknown overlay curve '" + o.name +
                                "' (known: " + join(known_curves(), ", ") +
                                ")");
  return o;
}

std::string plotdata_csv(const StoredRecord& stored,
                         const std::vector<OverlayCurve>& overlays) {
  const ResultRecord& rec = stored.record;
  if (rec.aggregates.empty())
    throw std::runtime_error("record has no aggregates to plot");
  const std::string& x_axis = rec.sweep_axis;

  std::string out = std::string(plot_schema) + "\n# x: " + x_axis +
                    "\nseries,x,y\n";
  auto emit = [&](const std::string& series, double x, double y) {
    out += series + "," + fmt_num(x) + "," + fmt_num(y) + "\n";
  };
  for (const auto& [stat, unused] : rec.aggregates.front().stats)
    for (const PointSummary& s : rec.aggregates)
      emit(stat, s.point.at(x_axis), s.stats.at(stat));

  for (const OverlayCurve& o : overlays) {
    auto it = curve_registry().find(o.name);
    if (it == curve_registry().end())
      throw std::invalid_argument("unknown overlay curve '" + o.name + "'");
    const CurveInfo& info = it->second;
    std::vector<std::string> have;
    for (const auto& [name, v] : rec.aggregates.front().point)
      have.push_back(name);
    for (const std::string& need : info.needs)
      if (!rec.aggregates.front().point.count(need))
        throw std::invalid_argument(
            "overlay '" + o.name + "' needs axis '" + need +
            "' but the record grid has axes [" + join(have, ", ") + "]");
    double c = resolve_constant(info, o.constant);
    for (const PointSummary& s : rec.aggregates)
      emit(o.name, s.point.at(x_axis), info.eval(s.point, c).first);
  }
  return out;
}

}  // namespace ncl

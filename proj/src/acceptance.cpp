#include "ncl/acceptance.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncl/bounds.hpp"
#include "ncl/classical.hpp"
#include "ncl/experiment.hpp"
#include "ncl/oracle.hpp"
#include "ncl/prf.hpp"
#include "ncl/quantum/oracles.hpp"
#include "ncl/quantum/sparse.hpp"
#include "ncl/quantum/state.hpp"
#include "ncl/stats.hpp"
#include "ncl/tuples.hpp"

namespace ncl {
namespace {

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

struct Outcome {
  bool ok = false;
  std::string detail;
};

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

double unitarity_deviation(const Eigen::MatrixXcd& m) {
  return max_abs(m.adjoint() * m -
                 Eigen::MatrixXcd::Identity(m.rows(), m.cols()));
}

int parity(uint64_t a, uint64_t b) { return std::popcount(a & b) & 1; }

// 1. Counting same-sum pairs among T random points: the sample mean must sit
// within 10% of C(T,2)/n and the far-left tail must be rare.
Outcome check_pair_counting() {
  OracleParams base{uint64_t{1} << 20, 1024, 2, 2, 0, 424242};
  CountStats cs = count_statistics(base, 256, 2000);
  bool mean_ok = std::abs(cs.mean - cs.expected_mean) <= 0.10 * cs.expected_mean;
  bool tail_ok = cs.tail_freq < 0.01;
  return {mean_ok && tail_ok,
          strf("2000 trials at n=1024, t=256: mean count %.3f vs expected "
               "%.3f (10%% band), freq[count <= half expected] = %.4f < 0.01",
               cs.mean, cs.expected_mean, cs.tail_freq)};
}

// 2. Unbounded two-stage solver: solid success rate at n=4096 with the
// squared tuple-oracle range, and median total queries scaling linearly in n.
Outcome check_classical_scaling() {
  std::vector<double> log_n, log_med;
  double success_at_4096 = 0;
  for (uint64_t n : {uint64_t{1024}, uint64_t{4096}, uint64_t{16384}}) {
    ExperimentSpec spec;
    spec.kind = "classical-solve";
    spec.axes = {{"n", {double(n)}},
                 {"n0", {double(n * n)}},
                 {"m", {double(uint64_t{1} << 20)}}};
    spec.trials = 200;
    spec.seed = 7001;
    ResultRecord rec = run_experiment(spec);
    if (n == 4096) success_at_4096 = rec.aggregates[0].stats.at("success_rate");
    log_n.push_back(std::log(double(n)));
    log_med.push_back(std::log(rec.aggregates[0].stats.at("queries.median")));
  }
  LinFit fit = linear_fit(log_n, log_med);
  bool success_ok = success_at_4096 >= 0.3;
  bool slope_ok = std::abs(fit.slope - 1.0) <= 0.15;
  return {success_ok && slope_ok,
          strf("success rate %.3f >= 0.3 at n=4096 (200 trials); log-log "
               "slope of median queries over n in {2^10,2^12,2^14} is "
               "%.3f (want 1 +- 0.15)",
               success_at_4096, fit.slope)};
}

// 3. Plain-table runs and compressed runs of the same random circuits give
// the same output distribution to solver precision.
Outcome check_oracle_equivalence() {
  ExperimentSpec spec;
  spec.kind = "oracle-equivalence";
  spec.axes = {{"queries", {3}}, {"m", {3}}, {"n", {2}}, {"w", {2}},
               {"r", {2}}};
  spec.trials = 50;
  spec.seed = 31415;
  ResultRecord rec = run_experiment(spec);
  double worst = rec.aggregates[0].stats.at("tv.max");
  return {worst < 1e-9,
          strf("50 random 3-query circuits at m=3, n=2: max total-variation "
               "distance %.3e < 1e-9",
               worst)};
}

// 4. Operator algebra on full matrices at m=3, n=4: all six query operators
// unitary to 1e-10, the cell decompression is an involution, the phase forms
// equal the conjugated XOR forms, and the compressed phase query acts on
// basis states by the exact three-branch coefficients.
Outcome check_operator_algebra() {
  using namespace q;
  const double tol = 1e-10;
  RegisterLayout plain{3, 4, 1, 1, DbMode::standard};
  RegisterLayout comp{3, 4, 1, 1, DbMode::compressed};
  auto mat = [](const RegisterLayout& l, void (*op)(Statevector&)) {
    return operator_matrix(l, [op](Statevector& s) { op(s); });
  };

  Eigen::MatrixXcd sto = mat(plain, apply_sto), pho = mat(plain, apply_pho),
                   hao = mat(plain, apply_hao), v_p = mat(plain, apply_v);
  Eigen::MatrixXcd csto = mat(comp, apply_csto), cpho = mat(comp, apply_cpho),
                   decomp = mat(comp, apply_std_decomp),
                   v_c = mat(comp, apply_v);

  double worst_unit = 0;
  for (const auto* m : {&sto, &pho, &hao, &csto, &cpho, &decomp})
    worst_unit = std::max(worst_unit, unitarity_deviation(*m));
  double invol = max_abs(decomp * decomp -
                         Eigen::MatrixXcd::Identity(decomp.rows(),
                                                    decomp.cols()));
  double conj_plain = max_abs(v_p * sto * v_p - pho);
  double conj_comp = max_abs(v_c * csto * v_c - cpho);

  // Three-branch basis action of the compressed phase query at m=2, n=4.
  RegisterLayout small{2, 4, 1, 1, DbMode::compressed};
  const uint64_t n = 4, bot = 4;
  double worst_branch = 0;
  for (uint64_t u = 0; u < n; ++u) {
    for (uint64_t d = 0; d <= bot; ++d) {
      std::vector<uint64_t> cells{d, bot};
      Statevector s = basis_state(small, AlgoCoord{0, u, 0, 0}, cells);
      apply_cpho(s);
      for (uint64_t c0 = 0; c0 <= bot; ++c0) {
        std::vector<uint64_t> out{c0, bot};
        Amp got = s.amps[algo_index(small, AlgoCoord{0, u, 0, 0}) *
                             db_dim(small) +
                         db_index(small, out)];
        double want = 0;
        if (u == 0) {
          want = c0 == d ? 1.0 : 0.0;
        } else if (d == bot) {
          want = c0 == bot ? 0.0 : (parity(u, c0) ? -1.0 : 1.0) / 2.0;
        } else {
          double sd = parity(u, d) ? -1.0 : 1.0;
          if (c0 == bot)
            want = sd / 2.0;
          else if (c0 == d)
            want = (1.0 + sd * (double(n) - 2.0)) / double(n);
          else
            want = (1.0 - (parity(u, c0) ? -1.0 : 1.0) - sd) / double(n);
        }
        worst_branch = std::max(worst_branch, std::abs(got - Amp(want)));
      }
    }
  }

  bool ok = worst_unit < tol && invol < tol && conj_plain < tol &&
            conj_comp < tol && worst_branch < tol;
  return {ok,
          strf("six operator matrices at m=3, n=4: unitarity dev %.2e, "
               "decompression involution dev %.2e, phase = conjugated-XOR "
               "dev %.2e/%.2e, three-branch coefficients dev %.2e "
               "(all < 1e-10)",
               worst_unit, invol, conj_plain, conj_comp, worst_branch)};
}

// 5. After T phase queries the compressed database holds at most T sampled
// cells: the amplitude mass on larger supports is numerical noise only.
Outcome check_database_support() {
  using namespace q;
  RegisterLayout l{3, 2, 2, 1, DbMode::compressed};
  double worst = 0;
  for (uint64_t t = 1; t <= 3; ++t) {
    Statevector s = empty_db_state(l);
    for (uint64_t i = 0; i < t; ++i) {
      apply_algo_unitary(
          s, random_unitary(algo_dim(l), derive_seed(505, t * 8 + i)));
      apply_cpho(s);
    }
    worst = std::max(worst, mass_with_db_size_above(s, t));
  }
  return {worst < 1e-12,
          strf("after t in {1,2,3} phase queries at m=3, n=2, amplitude "
               "mass on databases larger than t is %.3e < 1e-12",
               worst)};
}

// 6. Exact-simulation grid: final collision mass never exceeds the
// 20 t^2 V / n0 capacity ceiling.
Outcome check_capacity_ceiling() {
  double worst_ratio = 0;
  for (uint64_t n0 : {uint64_t{4}, uint64_t{8}, uint64_t{16}}) {
    for (uint64_t t : {uint64_t{2}, uint64_t{3}, uint64_t{4}}) {
      q::CapacityPoint pt = q::capacity_vs_collision(8, n0, t);
      worst_ratio = std::max(worst_ratio, pt.success / pt.bound);
    }
  }
  return {worst_ratio <= 1.0,
          strf("fresh-cell schedule grid m=8, n0 in {4,8,16}, t in {2,3,4}: "
               "max success/bound ratio %.4f <= 1",
               worst_ratio)};
}

// 7. Root machinery: closed forms to 1e-9 and the telescoping identity on
// 100 random two- and three-term specs.
Outcome check_root_machinery() {
  using namespace bounds;
  // Relative deviation, matching the solver's advertised residual bound of
  // 1e-9 * max(1, k_total).
  double dev = 0;
  dev = std::max(dev, std::abs(k_sol_root({10, {3}}) - 7.0) / 7.0);
  dev = std::max(dev, std::abs(k_sol_root({9, {0, 0}}) - 3.0) / 3.0);
  dev = std::max(dev, std::abs(k_sol_root({18, {2, 3}}) - 3.0) / 3.0);

  std::mt19937_64 rng(1234);
  int passed = 0;
  for (int i = 0; i < 100; ++i) {
    uint32_t ell = 2 + uint32_t(rng() % 2);
    RootSpec s;
    s.k_total = 5.0 + double(rng() % 5000);
    for (uint32_t j = 0; j < ell; ++j)
      s.ks.push_back(double(rng() % 1000) / 1000.0 * (s.k_total * 0.5));
    double root = k_sol_root(s);
    double threshold = (s.k_total - s.ks.back()) / root;
    passed += telescoping_identity_check(s, threshold);
  }
  return {dev < 1e-9 && passed == 100,
          strf("closed-form roots off by relative %.2e (< 1e-9); telescoping "
               "identity held on %d/100 random ell=2,3 specs",
               dev, passed)};
}

// 8. Monte Carlo tail of the max same-sum count stays under the closed-form
// ceiling with leading constant 8.
Outcome check_tail_bound() {
  OracleParams base{1024, 64, 2, 2, 0, 99};
  TailEstimate est = classical_tail_monte_carlo(base, 16, 4, 100000, 8.0);
  return {est.freq <= est.bound,
          strf("100000 trials at n=64, t=16, k=4: tail frequency %.4f <= "
               "ceiling %.1f (constant 8)",
               est.freq, est.bound)};
}

// 9. Segment-bounded runs: expected capacity grows linearly across a
// four-point budget sweep and hugs a fitted c * s^1.5 t / sqrt(n) curve.
Outcome check_segmented_capacity() {
  // Budgets are multiples of the planner's segment length (1024 here) so
  // each step adds whole segments.
  const double s_bits = 64, n = 16384;
  std::vector<double> ts{1024, 2048, 3072, 4096}, caps, shape;
  for (double t : ts) {
    ExperimentSpec spec;
    spec.kind = "segmented-capacity";
    spec.axes = {{"n", {n}}, {"m", {65536}}, {"s_bits", {s_bits}},
                 {"t_total", {t}}};
    spec.trials = 8;
    spec.seed = 9001;
    ResultRecord rec = run_experiment(spec);
    caps.push_back(rec.aggregates[0].stats.at("capacity.mean"));
    shape.push_back(std::pow(s_bits, 1.5) * t / std::sqrt(n));
  }
  LinFit fit = linear_fit(ts, caps);
  double num = 0, den = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    num += caps[i] * shape[i];
    den += shape[i] * shape[i];
  }
  double c_fit = num / den;
  double worst = 0;
  for (size_t i = 0; i < ts.size(); ++i)
    worst = std::max(worst, caps[i] / (c_fit * shape[i]));
  // Points may sit above a least-squares fit by its residuals; allow 25%.
  bool ok = fit.r2 > 0.9 && worst <= 1.25;
  return {ok,
          strf("capacity sweep t in {1024..4096} at n=2^14, s=64 bits: "
               "linear fit r^2 %.4f > 0.9; worst point sits at %.3f of the "
               "fitted c*s^1.5*t/sqrt(n) curve (c=%.4g, allow 1.25)",
               fit.r2, worst, c_fit)};
}

// 10. Desk scale cannot reach the asymptotic separations; state the analytic
// windows instead and pin their endpoints.
Outcome check_separation_windows() {
  bounds::Window c2 = bounds::separation_window_classical(2);
  bounds::Window q4 = bounds::separation_window_quantum(4);
  double dev = 0;
  bool ok = !c2.empty && !q4.empty;
  if (ok) {
    dev = std::max({std::abs(c2.lo - 0.5), std::abs(c2.hi - 2.0),
                    std::abs(q4.lo - 22.0 / 25.0), std::abs(q4.hi - 1.0)});
    ok = dev < 1e-12;
  }
  return {ok,
          strf("analytic only (no desk-scale run): classical ell=2 exponent "
               "window (1/2, 2] and quantum ell=4 window (22/25, 1] "
               "reproduced to %.1e",
               dev)};
}

}  // namespace

int run_acceptance(std::ostream& os) {
  struct Criterion {
    const char* name;
    double time_limit_sec;  // 0 = untimed
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"pair counting", 60, check_pair_counting},
      {"classical solver scaling", 300, check_classical_scaling},
      {"oracle equivalence", 60, check_oracle_equivalence},
      {"operator algebra", 0, check_operator_algebra},
      {"database support", 0, check_database_support},
      {"capacity ceiling", 0, check_capacity_ceiling},
      {"root machinery", 0, check_root_machinery},
      {"tail bound", 120, check_tail_bound},
      {"segmented capacity", 0, check_segmented_capacity},
      {"separation windows", 0, check_separation_windows},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, strf("threw: %s", e.what())};
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    bool in_time = c.time_limit_sec == 0 || secs < c.time_limit_sec;
    bool ok = out.ok && in_time;
    failures += !ok;
    os << (ok ? "[PASS] " : "[FAIL] ") << index << ". " << c.name << ": "
       << out.detail << strf(" (%.1fs", secs);
    if (c.time_limit_sec > 0) os << strf(" < %.0fs limit", c.time_limit_sec);
    os << ")\n";
  }
  os << "acceptance: " << (10 - failures) << "/10 criteria passed\n";
  return failures;
}

}  // namespace ncl

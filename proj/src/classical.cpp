#include "ncl/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "ncl/bounds.hpp"
#include "ncl/prf.hpp"

namespace ncl {

namespace {

// t distinct points from [lo, lo + span), ascending.
std::vector<uint64_t> sample_points(uint64_t lo, uint64_t span, uint64_t t,
                                    std::mt19937_64& rng) {
  if (t > span) throw std::invalid_argument("sample_points: more points than the block holds");
  std::unordered_set<uint64_t> seen;
  std::vector<uint64_t> pts;
  pts.reserve(t);
  while (pts.size() < t) {
    uint64_t x = lo + rng() % span;
    if (seen.insert(x).second) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

double factorial(uint32_t k) {
  double f = 1;
  for (uint32_t i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

SolverConfig derive_config(const OracleParams& p, uint64_t seed) {
  SolverConfig cfg;
  cfg.seed = seed;
  cfg.k_target = std::max<uint64_t>(2, llround(1.5 * std::sqrt(double(p.n0))));
  double t1 = std::pow(factorial(p.ell) * double(cfg.k_target) * double(p.n),
                       1.0 / double(p.ell));
  cfg.t1 = std::max<uint64_t>(p.ell, uint64_t(std::ceil(t1)));
  return cfg;
}

SolverReport solve_unbounded(const OracleInstance& inst, const SolverConfig& cfg_in) {
  const OracleParams& p = inst.params();
  SolverConfig cfg = cfg_in;
  if (cfg.k_target == 0 || cfg.t1 == 0) {
    SolverConfig d = derive_config(p, cfg.seed);
    if (cfg.k_target == 0) cfg.k_target = d.k_target;
    if (cfg.t1 == 0) cfg.t1 = d.t1;
  }
  if (cfg.t1 > p.m)
    throw std::invalid_argument("solve_unbounded: t1 exceeds the point domain");

  SolverReport rep;
  rep.regime_ok = bounds::classical_upper_T(double(p.n), double(p.n0), p.ell).regime_ok;
  rep.t1 = cfg.t1;

  std::mt19937_64 rng(cfg.seed);
  std::vector<uint64_t> pts = sample_points(0, p.m, cfg.t1, rng);
  std::vector<uint64_t> vals(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) vals[i] = inst.query_h(rep.ledger, pts[i]);

  auto tuples = same_sum_tuples(pts, vals, p.n, p.ell, p.y, cfg.k_target);
  rep.tuples_found = tuples.size();

  std::unordered_map<uint64_t, size_t> first_by_gval;
  for (size_t i = 0; i < tuples.size(); ++i) {
    uint64_t g = inst.query_g(rep.ledger, tuple_index(p, tuples[i]));
    ++rep.t2;
    auto [it, fresh] = first_by_gval.try_emplace(g, i);
    if (!fresh) {
      rep.success = true;
      rep.witness = Witness{tuples[it->second], tuples[i], p.y, g};
      break;
    }
  }
  return rep;
}

SegmentPlan make_segment_plan(uint64_t t_total, uint64_t s_bits,
                              const OracleParams& p, double c) {
  if (t_total == 0) throw std::invalid_argument("make_segment_plan: zero budget");
  SegmentPlan plan;
  plan.s_bits = s_bits;
  if (s_bits == no_space_bound) {
    plan.segments = 1;
    plan.t_prime = t_total;
    return plan;
  }
  uint64_t need = uint64_t(std::ceil(std::log2(double(p.n))));
  if (s_bits < need)
    throw std::invalid_argument("make_segment_plan: s_bits below ceil(log2 n)");
  double tp = c * std::pow(double(s_bits) * double(p.n), 1.0 / double(p.ell));
  plan.t_prime = std::max<uint64_t>(p.ell + 1, llround(tp));
  plan.t_prime = std::min(plan.t_prime, t_total);
  plan.segments = (t_total + plan.t_prime - 1) / plan.t_prime;
  return plan;
}

SegmentContext::SegmentContext(const OracleInstance& inst, FlipMemory& mem,
                               QueryLedger& led, uint64_t budget, uint64_t segment)
    : inst_(inst), mem_(mem), led_(led), budget_(budget), segment_(segment) {}

const OracleParams& SegmentContext::params() const { return inst_.params(); }

void SegmentContext::charge() {
  if (used_ >= budget_)
    throw BudgetExhausted("segment " + std::to_string(segment_) +
                          ": budget of " + std::to_string(budget_) + " exhausted");
  ++used_;
}

uint64_t SegmentContext::query_h(uint64_t x) {
  charge();
  points_.push_back(x);
  return inst_.query_h(led_, x);
}

uint64_t SegmentContext::flip(uint64_t tuple_index) {
  charge();
  return mem_.flip(led_, tuple_index);
}

namespace {

struct BitScan {
  std::vector<uint64_t> per_residue;  // valid set bits by sum residue
  uint64_t invalid = 0;
  uint64_t undeclared = 0;
  uint64_t at_target = 0;
};

BitScan scan_set_bits(const OracleInstance& inst, const FlipMemory& mem,
                      const std::unordered_set<uint64_t>& declared) {
  const OracleParams& p = inst.params();
  BitScan scan;
  scan.per_residue.assign(p.n, 0);
  for (uint64_t idx : mem.set_bits()) {
    Tuple t = tuple_from_index(p, idx);
    if (!tuple_valid(p, t)) {
      ++scan.invalid;
      continue;
    }
    uint64_t s = 0;
    bool covered = true;
    for (uint64_t x : t) {
      s = (s + inst.h_at(x)) % p.n;
      covered = covered && declared.count(x) != 0;
    }
    ++scan.per_residue[s];
    if (!covered) ++scan.undeclared;
    if (s == p.y && covered) ++scan.at_target;
  }
  return scan;
}

}  // namespace

SegmentedReport run_segmented(const OracleInstance& inst, FlipMemory& mem,
                              SegmentStrategy& strategy, const SegmentPlan& plan) {
  const OracleParams& p = inst.params();
  if (plan.t_prime == 0 || plan.segments == 0)
    throw std::invalid_argument("run_segmented: empty plan");
  if (plan.s_bits != no_space_bound &&
      plan.s_bits < uint64_t(std::ceil(std::log2(double(p.n)))))
    throw std::invalid_argument("run_segmented: s_bits below ceil(log2 n)");

  SegmentedReport rep;
  rep.ledger.s_bits = plan.s_bits;
  std::unordered_set<uint64_t> declared;
  StateBlob carried;

  for (uint64_t seg = 0; seg < plan.segments; ++seg) {
    if (plan.s_bits != no_space_bound && carried.size() * 8 > plan.s_bits) {
      rep.aborted = true;
      rep.abort_reason = "carried state of " + std::to_string(carried.size() * 8) +
                         " bits exceeds the " + std::to_string(plan.s_bits) +
                         "-bit bound";
      break;
    }
    SegmentContext ctx(inst, mem, rep.ledger, plan.t_prime, seg);
    uint64_t h_before = rep.ledger.t_h, f_before = rep.ledger.t_flip;
    try {
      carried = strategy.run_segment(ctx, carried);
    } catch (const BudgetExhausted& e) {
      rep.aborted = true;
      rep.abort_reason = e.what();
      break;
    }
    for (uint64_t x : ctx.queried_points()) declared.insert(x);

    SegmentRecord rec;
    rec.segment = seg;
    rec.h_queries = rep.ledger.t_h - h_before;
    rec.flips = rep.ledger.t_flip - f_before;
    BitScan scan = scan_set_bits(inst, mem, declared);
    rec.same_sum_set_bits = scan.at_target;

    // Ground-truth cross-check: every covered set bit at the target residue
    // must appear in the enumeration over the points queried so far.
    std::vector<uint64_t> pts(declared.begin(), declared.end());
    std::sort(pts.begin(), pts.end());
    std::vector<uint64_t> vals(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) vals[i] = inst.h_at(pts[i]);
    std::unordered_set<uint64_t> truth;
    for (const Tuple& t : same_sum_tuples(pts, vals, p.n, p.ell, p.y))
      truth.insert(tuple_index(p, t));
    uint64_t matched = 0;
    for (uint64_t idx : mem.set_bits())
      if (truth.count(idx)) ++matched;
    if (matched != scan.at_target)
      throw std::logic_error("run_segmented: set bits disagree with ground-truth enumeration");

    rep.per_segment.push_back(rec);
  }

  BitScan scan = scan_set_bits(inst, mem, declared);
  rep.invalid_bits = scan.invalid;
  rep.undeclared_bits = scan.undeclared;
  rep.set_bits_total = mem.set_bits().size();
  for (uint64_t r = 0; r < p.n; ++r) {
    if (scan.per_residue[r] > rep.capacity) {
      rep.capacity = scan.per_residue[r];
      rep.capacity_residue = r;
    }
  }
  return rep;
}

RestartStrategy::RestartStrategy(uint64_t seed, uint64_t total_segments,
                                 double point_fraction)
    : seed_(seed), total_segments_(total_segments), point_fraction_(point_fraction) {
  if (total_segments == 0) throw std::invalid_argument("RestartStrategy: no segments");
  if (!(point_fraction > 0) || !(point_fraction < 1))
    throw std::invalid_argument("RestartStrategy: fraction must be in (0,1)");
}

StateBlob RestartStrategy::run_segment(SegmentContext& ctx, const StateBlob&) {
  const OracleParams& p = ctx.params();
  const uint64_t block = p.m / total_segments_;
  if (block < 2)
    throw std::invalid_argument("RestartStrategy: domain block too small");
  const uint64_t base = ctx.segment() * block;
  uint64_t q = std::max<uint64_t>(p.ell, uint64_t(point_fraction_ * double(ctx.budget_left())));
  q = std::min(q, block / 2);  // keep rejection sampling cheap
  std::mt19937_64 rng(derive_seed(seed_, ctx.segment()));

  std::unordered_set<uint64_t> seen;
  std::vector<uint64_t> pts;
  std::vector<uint64_t> vals;
  pts.reserve(q);
  while (pts.size() < q) {
    uint64_t x = base + rng() % block;
    if (seen.insert(x).second) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  vals.resize(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) vals[i] = ctx.query_h(pts[i]);

  for (const Tuple& t : same_sum_tuples(pts, vals, p.n, p.ell, p.y)) {
    if (ctx.budget_left() == 0) break;
    ctx.flip(tuple_index(p, t));
  }
  return {};
}

TailEstimate classical_tail_monte_carlo(const OracleParams& base, uint64_t t,
                                        uint64_t k, uint64_t trials, double c) {
  validate(base);
  if (t > base.m) throw std::invalid_argument("tail estimate: t exceeds m");
  if (k == 0 || trials == 0) throw std::invalid_argument("tail estimate: zero k or trials");
  TailEstimate est;
  est.trials = trials;
  est.bound = bounds::classical_tail_bound(double(t), double(k), base.ell,
                                           double(base.n), c);
  uint64_t hits = 0;
  std::vector<uint64_t> vals(t);
  for (uint64_t i = 0; i < trials; ++i) {
    OracleParams p = base;
    p.seed = derive_seed(base.seed, i);
    OracleInstance inst = OracleInstance::make(p);
    for (uint64_t x = 0; x < t; ++x) vals[x] = inst.h_at(x);
    auto counts = same_sum_counts(vals, p.n, p.ell);
    if (*std::max_element(counts.begin(), counts.end()) >= k) ++hits;
  }
  est.freq = double(hits) / double(trials);
  return est;
}

}  // namespace ncl

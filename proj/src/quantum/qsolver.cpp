#include "ncl/quantum/qsolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "ncl/prf.hpp"
#include "ncl/quantum/grover.hpp"

namespace ncl::q {

namespace {

constexpr uint64_t max_candidates = uint64_t{1} << 20;

// `want` points of [m] not in `used`, ascending; fewer when the domain runs
// dry.  Points are added to `used`.
std::vector<uint64_t> fresh_points(uint64_t m, uint64_t want,
                                   std::unordered_set<uint64_t>& used,
                                   std::mt19937_64& rng) {
  const uint64_t take = std::min(want, m - used.size());
  std::vector<uint64_t> pts;
  pts.reserve(take);
  while (pts.size() < take) {
    const uint64_t x = rng() % m;
    if (used.insert(x).second) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

// Every strictly increasing k-subset of `pts` with its value sum mod n.
void build_prefixes(std::span<const uint64_t> pts, std::span<const uint64_t> vals,
                    uint32_t k, uint64_t n, std::vector<Tuple>& prefixes,
                    std::vector<uint64_t>& sums) {
  const size_t np = pts.size();
  if (k == 0 || np < k) return;
  std::vector<size_t> idx(k);
  for (size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    Tuple t(k);
    uint64_t s = 0;
    for (size_t i = 0; i < k; ++i) {
      t[i] = pts[idx[i]];
      s += vals[idx[i]];
    }
    prefixes.push_back(std::move(t));
    sums.push_back(s % n);
    size_t i = k;
    bool done = true;
    while (i-- > 0) {
      if (idx[i] < np - k + i) {
        ++idx[i];
        for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        done = false;
        break;
      }
    }
    if (done) return;
  }
}

}  // namespace

QSolverReport quantum_toy_solve(const OracleInstance& inst, const QSolverConfig& cfg) {
  const OracleParams& p = inst.params();
  if (p.ell < 2)
    throw std::invalid_argument("the staged search needs tuples of at least two points");
  if (p.m > 64 || p.n > 64 || p.n0 > 4096)
    throw std::invalid_argument("outside the toy regime: need m <= 64, n <= 64, n0 <= 4096");
  if (cfg.t1 > p.m) throw std::invalid_argument("stage-1 budget exceeds the domain");

  QSolverReport rep;
  std::mt19937_64 rng(cfg.seed);
  std::unordered_set<uint64_t> used;

  // Stage 1: collect same-sum tuples from t1 fresh points.
  const std::vector<uint64_t> pts1 = fresh_points(p.m, cfg.t1, used, rng);
  std::vector<uint64_t> vals1;
  vals1.reserve(pts1.size());
  for (uint64_t x : pts1) vals1.push_back(inst.query_h(rep.ledger, x));
  rep.t1 = pts1.size();
  const std::vector<Tuple> tuples =
      same_sum_tuples(pts1, vals1, p.n, p.ell, p.y, cfg.k_cap);
  rep.tuples_collected = tuples.size();

  // Stage 2: one tuple query each; a repeated value is already a collision.
  std::unordered_map<uint64_t, size_t> by_gval;
  for (size_t i = 0; i < tuples.size(); ++i) {
    const uint64_t g = inst.query_g(rep.ledger, tuple_index(p, tuples[i]));
    ++rep.t2;
    const auto [it, fresh] = by_gval.try_emplace(g, i);
    if (!fresh) {
      rep.early_exit = true;
      rep.success = true;
      rep.witness = Witness{tuples[it->second], tuples[i], p.y, g};
      return rep;
    }
  }

  // Stage 3: fresh points and their (ell−1)-subsets.
  const std::vector<uint64_t> pts3 = fresh_points(p.m, cfg.t3, used, rng);
  std::vector<uint64_t> vals3;
  vals3.reserve(pts3.size());
  for (uint64_t x : pts3) vals3.push_back(inst.query_h(rep.ledger, x));
  rep.t3 = pts3.size();
  std::vector<Tuple> prefixes;
  std::vector<uint64_t> prefix_sums;
  build_prefixes(pts3, vals3, p.ell - 1, p.n, prefixes, prefix_sums);
  rep.prefixes = prefixes.size();

  // Stage 4: amplify over (prefix, last point) completions.
  if (prefixes.empty() || by_gval.empty()) {
    rep.stage4_skipped = true;
    return rep;
  }
  rep.grover_domain = prefixes.size() * p.m;
  if (rep.grover_domain > max_candidates)
    throw std::invalid_argument("candidate space too large for the toy regime");
  rep.marked_estimate = std::max<uint64_t>(
      1, uint64_t(std::llround(double(prefixes.size()) * double(p.m) / double(p.n) *
                               double(by_gval.size()) / double(p.n0))));
  rep.iterations = grover_iterations(rep.grover_domain, rep.marked_estimate);

  const auto predicate = [&](uint64_t idx) {
    const uint64_t pi = idx / p.m;
    const uint64_t z = idx % p.m;
    const Tuple& pre = prefixes[pi];
    if (z <= pre.back()) return false;
    if ((prefix_sums[pi] + inst.h_at(z)) % p.n != p.y) return false;
    Tuple cand = pre;
    cand.push_back(z);
    const auto it = by_gval.find(inst.g_at(tuple_index(p, cand)));
    return it != by_gval.end() && tuples[it->second] != cand;
  };
  const GroverResult gr = grover_search(rep.grover_domain, predicate, rep.iterations,
                                        derive_seed(cfg.seed, 4));
  rep.marked = gr.marked;
  rep.success_prob = gr.success_prob;
  // Each round evaluates the completion once: one point query plus one
  // tuple query.
  rep.t4 = 2 * rep.iterations;
  rep.ledger.t_h += rep.iterations;
  rep.ledger.t_g += rep.iterations;
  if (gr.hit) {
    const uint64_t pi = gr.candidate / p.m;
    Tuple cand = prefixes[pi];
    cand.push_back(gr.candidate % p.m);
    const uint64_t g = inst.g_at(tuple_index(p, cand));
    rep.witness = Witness{tuples[by_gval.at(g)], std::move(cand), p.y, g};
    rep.success = true;
  }
  return rep;
}

}  // namespace ncl::q

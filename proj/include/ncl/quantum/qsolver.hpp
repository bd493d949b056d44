#pragma once

#include <cstdint>
#include <optional>

#include "ncl/oracle.hpp"
#include "ncl/tuples.hpp"

namespace ncl::q {

// Stage budgets for the four-stage tuple-collision search.  All sampling is
// deterministic in `seed`.
struct QSolverConfig {
  uint64_t t1 = 12;    // stage 1: point queries used to collect tuples
  uint64_t k_cap = 6;  // stage 2: most same-sum tuples carried forward
  uint64_t t3 = 8;     // stage 3: fresh point queries for prefixes
  uint64_t seed = 1;
};

struct QSolverReport {
  bool success = false;
  std::optional<Witness> witness;
  QueryLedger ledger;  // all charged H/G traffic across the four stages

  // Per-stage query counts: t1 = stage-1 H, t2 = stage-2 G, t3 = stage-3 H,
  // t4 = stage-4 amplified queries (one H plus one G per round).
  uint64_t t1 = 0, t2 = 0, t3 = 0, t4 = 0;

  uint64_t tuples_collected = 0;  // same-sum tuples found in stage 1
  uint64_t prefixes = 0;          // (ell−1)-subsets formed in stage 3
  uint64_t grover_domain = 0;     // prefixes × m candidate pairs
  uint64_t marked = 0;            // exact marked count (simulator side)
  uint64_t marked_estimate = 0;   // estimate the algorithm steers by
  uint64_t iterations = 0;
  double success_prob = 0;        // exact stage-4 hit mass; 0 when skipped
  bool early_exit = false;        // stage 2 already collided
  bool stage4_skipped = false;    // nothing to amplify over
};

// Four-stage search at desk scale: (1) query t1 fresh points and keep up to
// k_cap strictly increasing tuples whose value sum hits y; (2) query the
// tuple oracle on each, stopping early on a repeated value; (3) query t3
// more fresh points and form every (ell−1)-subset as a prefix; (4) amplify
// over (prefix, last point) pairs whose completed tuple sums to y and
// repeats a stage-2 value, then sample once and rebuild the collision.
// Throws std::invalid_argument outside the toy regime (m ≤ 64, n ≤ 64,
// n0 ≤ 4096, candidate space ≤ 2^20) or when t1 exceeds m.
QSolverReport quantum_toy_solve(const OracleInstance& inst, const QSolverConfig& cfg);

}  // namespace ncl::q

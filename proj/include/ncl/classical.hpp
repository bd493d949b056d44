#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncl/oracle.hpp"
#include "ncl/tuples.hpp"

namespace ncl {

// Two-stage collision search with unbounded scratch space: sample points,
// collect same-sum tuples, then query the tuple oracle looking for a repeat.
struct SolverConfig {
  uint64_t k_target = 0;  // tuples to collect; 0 derives round(1.5 sqrt(n0))
  uint64_t t1 = 0;        // points to sample; 0 derives ceil((ell! k n)^(1/ell))
  uint64_t seed = 0;      // drives point sampling only
};

struct SolverReport {
  bool success = false;
  std::optional<Witness> witness;
  uint64_t t1 = 0;            // points queried in stage 1
  uint64_t tuples_found = 0;  // same-sum tuples collected (capped at k_target)
  uint64_t t2 = 0;            // tuples sent to the tuple oracle
  bool regime_ok = true;      // n0 small enough for the two stages to balance
  QueryLedger ledger;
};

SolverConfig derive_config(const OracleParams& p, uint64_t seed);
SolverReport solve_unbounded(const OracleInstance& inst, const SolverConfig& cfg);

// ---------------------------------------------------------------------------
// Space-bounded segmented execution. A strategy runs in L segments; between
// segments only a serialized state blob of at most s_bits survives. Queries
// and flips share one per-segment budget. The write-only memory lives with
// the harness and persists across segments.

struct SegmentPlan {
  uint64_t segments = 1;             // L
  uint64_t t_prime = 0;              // per-segment budget, H queries + flips
  uint64_t s_bits = no_space_bound;  // carried-state cap in bits
};

// T' = max(ell+1, round(c * (s_bits * n)^(1/ell))), L = ceil(t_total / T').
// With s_bits = no_space_bound the plan is a single segment of budget t_total.
SegmentPlan make_segment_plan(uint64_t t_total, uint64_t s_bits,
                              const OracleParams& p, double c = 1.0);

struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SegmentContext {
 public:
  SegmentContext(const OracleInstance& inst, FlipMemory& mem, QueryLedger& led,
                 uint64_t budget, uint64_t segment);

  uint64_t query_h(uint64_t x);
  uint64_t flip(uint64_t tuple_index);
  uint64_t segment() const { return segment_; }
  uint64_t budget_left() const { return budget_ - used_; }
  const OracleParams& params() const;
  // Points this segment queried, in call order. The executor keeps the
  // cumulative set for verification.
  const std::vector<uint64_t>& queried_points() const { return points_; }

 private:
  void charge();
  const OracleInstance& inst_;
  FlipMemory& mem_;
  QueryLedger& led_;
  uint64_t budget_ = 0, used_ = 0, segment_ = 0;
  std::vector<uint64_t> points_;
};

using StateBlob = std::vector<uint8_t>;  // little-endian packed carried state

class SegmentStrategy {
 public:
  virtual ~SegmentStrategy() = default;
  virtual StateBlob run_segment(SegmentContext& ctx, const StateBlob& carried) = 0;
};

struct SegmentRecord {
  uint64_t segment = 0;
  uint64_t h_queries = 0;
  uint64_t flips = 0;
  // Set bits decoding to valid tuples with sum y, cumulative at segment end,
  // each cross-checked against ground-truth enumeration over the queried
  // points.
  uint64_t same_sum_set_bits = 0;
};

struct SegmentedReport {
  bool aborted = false;
  std::string abort_reason;
  std::vector<SegmentRecord> per_segment;
  uint64_t capacity = 0;          // max over residues of valid same-sum set bits
  uint64_t capacity_residue = 0;
  uint64_t set_bits_total = 0;
  uint64_t invalid_bits = 0;      // set bits whose index is not an increasing tuple
  uint64_t undeclared_bits = 0;   // valid set bits touching never-queried points
  QueryLedger ledger;
};

SegmentedReport run_segmented(const OracleInstance& inst, FlipMemory& mem,
                              SegmentStrategy& strategy, const SegmentPlan& plan);

// Reference strategy: each segment works inside its own block of the domain,
// queries fresh points, lists same-sum-y tuples among them, flips each once.
// Carries nothing between segments.
class RestartStrategy : public SegmentStrategy {
 public:
  RestartStrategy(uint64_t seed, uint64_t total_segments, double point_fraction = 0.9);
  StateBlob run_segment(SegmentContext& ctx, const StateBlob& carried) override;

 private:
  uint64_t seed_;
  uint64_t total_segments_;
  double point_fraction_;
};

// ---------------------------------------------------------------------------
// Tail of the same-sum count for a nonadaptive T-query algorithm, estimated
// by Monte Carlo and paired with the closed-form ceiling.

struct TailEstimate {
  double freq = 0;    // Pr[some residue collects >= k tuples]
  double bound = 0;   // (c T^ell / (k^(1/ell) n))^(k^(1/ell))
  uint64_t trials = 0;
};

TailEstimate classical_tail_monte_carlo(const OracleParams& base, uint64_t t,
                                        uint64_t k, uint64_t trials, double c = 8.0);

}  // namespace ncl

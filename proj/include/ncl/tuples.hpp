#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ncl/oracle.hpp"

namespace ncl {

// A candidate solution element: strictly increasing points of [m].
using Tuple = std::vector<uint64_t>;

bool tuple_valid(const OracleParams& p, const Tuple& t);

// Row-major encoding of an ordered tuple into [m^ell] and back; this is the
// index the tuple oracle and the write-only memory are addressed by.
uint64_t tuple_index(const OracleParams& p, const Tuple& t);
Tuple tuple_from_index(const OracleParams& p, uint64_t index);

// Sum of the tuple's point values mod n. Charges ell point queries.
uint64_t tuple_sum(const OracleInstance& inst, QueryLedger& led, const Tuple& t);

// A claimed collision: two distinct tuples, both summing to y, with equal
// tuple-oracle values.
struct Witness {
  Tuple a, b;
  uint64_t y = 0;
  uint64_t gval = 0;
};

// Checks a != b, both tuples valid, both sums equal to y, and equal G values.
// Verification is harness work: it reads the oracles without charging.
bool verify_witness(const OracleInstance& inst, const Witness& w);

void to_json(nlohmann::json& j, const Witness& w);
void from_json(const nlohmann::json& j, Witness& w);

// Index of strictly increasing (ell-1)-prefixes keyed by partial sum mod n.
// Completing a prefix with a larger point z costs one lookup at (y - H(z)).
class TupleSumIndex {
 public:
  TupleSumIndex(uint64_t n, uint32_t prefix_len);

  void insert(const Tuple& prefix, uint64_t partial_sum);
  const std::vector<Tuple>* lookup(uint64_t residue) const;
  uint64_t size() const { return count_; }

 private:
  uint64_t n_;
  uint32_t prefix_len_;
  uint64_t count_ = 0;
  std::unordered_map<uint64_t, std::vector<Tuple>> by_residue_;
};

// All strictly increasing ell-tuples over `points` whose value sum is y mod n,
// in colexicographic order, given the point values directly. `points` must be
// strictly increasing; `vals` runs parallel to it. Stops after `limit` tuples.
std::vector<Tuple> same_sum_tuples(std::span<const uint64_t> points,
                                   std::span<const uint64_t> vals,
                                   uint64_t n, uint32_t ell, uint64_t y,
                                   uint64_t limit = ~uint64_t{0});

// Count per residue class: out[r] = number of increasing ell-tuples over the
// points whose sum is r mod n.
std::vector<uint64_t> same_sum_counts(std::span<const uint64_t> vals,
                                      uint64_t n, uint32_t ell);

// Ground-truth enumeration against an instance. Charges each point exactly
// once, then works from the cached values. Fewer than ell points yields an
// empty list, not an error.
std::vector<Tuple> enumerate_same_sum_tuples(const OracleInstance& inst,
                                             QueryLedger& led,
                                             std::vector<uint64_t> points,
                                             uint64_t y,
                                             uint64_t limit = ~uint64_t{0});

// One line per tuple: sum, then the points. First line is a version header.
void write_tuples_csv(std::ostream& os, const OracleInstance& inst,
                      const std::vector<Tuple>& tuples);

// Monte Carlo distribution of the same-sum tuple count over fresh instances:
// query the first t points, count increasing ell-tuples with sum y.
struct CountStats {
  double mean = 0;
  double variance = 0;
  double expected_mean = 0;       // binom(t, ell) / n
  double tail_freq = 0;           // frequency of count <= expected_mean / 2
  uint64_t trials = 0;
};

CountStats count_statistics(const OracleParams& base, uint64_t t, uint64_t trials);

// binom(t, k) in double precision; desk-scale arguments only.
double binom(uint64_t t, uint64_t k);

}  // namespace ncl

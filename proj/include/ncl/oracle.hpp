#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

namespace ncl {

// Problem instance shape: a point oracle H : [m] -> [n], a tuple oracle
// G : [m^ell] -> [n0], and a target residue y for sums taken mod n.
struct OracleParams {
  uint64_t m = 0;
  uint64_t n = 0;
  uint64_t n0 = 0;
  uint32_t ell = 0;
  uint64_t y = 0;
  uint64_t seed = 0;
};

// Throws std::invalid_argument unless the parameters describe a nonempty
// problem: m, n, n0 >= 2, ell >= 1, y < n, at least one strictly increasing
// ell-tuple exists (m >= ell), and m^ell fits in a 64-bit index.
void validate(const OracleParams& p);

// m^ell, checked against overflow.
uint64_t tuple_space(const OracleParams& p);

inline constexpr uint64_t no_space_bound = ~uint64_t{0};

// Counts every chargeable oracle interaction. Solvers write into a ledger
// they are handed; harness-side verification uses uncharged lookups instead.
struct QueryLedger {
  uint64_t t_h = 0;
  uint64_t t_g = 0;
  uint64_t t_flip = 0;
  uint64_t s_bits = no_space_bound;

  uint64_t total_queries() const { return t_h + t_g + t_flip; }
};

// Oracle access with lazily derived values: nothing is stored, each value is
// recomputed from (seed, tag, index), so concurrent reads are safe and memory
// stays O(1). Tests can instead pin explicit tables.
class OracleInstance {
 public:
  static OracleInstance make(const OracleParams& p);
  static OracleInstance from_tables(const OracleParams& p,
                                    std::vector<uint64_t> h,
                                    std::vector<uint64_t> g);

  const OracleParams& params() const { return p_; }

  // Charged queries. Every invocation bumps the ledger, including repeats.
  uint64_t query_h(QueryLedger& led, uint64_t x) const;
  uint64_t query_g(QueryLedger& led, uint64_t tuple_index) const;

  // Uncharged lookups for verification, statistics, and ground-truth
  // enumeration harnesses.
  uint64_t h_at(uint64_t x) const;
  uint64_t g_at(uint64_t tuple_index) const;

 private:
  OracleInstance() = default;
  OracleParams p_;
  uint64_t tuple_space_ = 0;
  bool fixed_ = false;
  std::vector<uint64_t> h_table_, g_table_;
};

// Write-only tuple memory: flip toggles a tuple's bit, the reply for a tuple
// is sampled once and repeats verbatim on later calls. Owned by the harness,
// never by a strategy.
class FlipMemory {
 public:
  FlipMemory(uint64_t reply_range, uint64_t seed);

  uint64_t flip(QueryLedger& led, uint64_t tuple_index);
  bool is_set(uint64_t tuple_index) const;
  const std::unordered_set<uint64_t>& set_bits() const { return flipped_; }
  uint64_t reply_range() const { return range_; }

 private:
  uint64_t range_ = 0;
  uint64_t seed_ = 0;
  std::unordered_set<uint64_t> flipped_;
  std::unordered_map<uint64_t, uint64_t> replies_;
};

void to_json(nlohmann::json& j, const OracleParams& p);
void from_json(const nlohmann::json& j, OracleParams& p);
void to_json(nlohmann::json& j, const QueryLedger& l);
void from_json(const nlohmann::json& j, QueryLedger& l);

// Experiment record fragment: {"params": {...}, "ledger": {...}}.
nlohmann::json instance_record(const OracleParams& p, const QueryLedger& l);

}  // namespace ncl

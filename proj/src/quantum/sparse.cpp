#include "ncl/quantum/sparse.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace ncl::q {

namespace {

uint64_t digit_bits(uint64_t n) { return std::bit_width(n); }

uint64_t digit_at(uint64_t key, uint64_t x, uint64_t bits) {
  return (key >> (x * bits)) & ((uint64_t{1} << bits) - 1);
}

uint64_t with_digit(uint64_t key, uint64_t x, uint64_t bits, uint64_t digit) {
  const uint64_t mask = ((uint64_t{1} << bits) - 1) << (x * bits);
  return (key & ~mask) | (digit << (x * bits));
}

int parity(uint64_t a, uint64_t b) { return std::popcount(a & b) & 1; }

}  // namespace

SparseDb sparse_empty(uint64_t m, uint64_t n) {
  if (m < 1) throw std::invalid_argument("sparse database needs at least one cell");
  if (n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("sparse database range must be a power of two, at least 2");
  if (m * digit_bits(n) > 64)
    throw std::invalid_argument("sparse database key exceeds 64 bits");
  SparseDb db;
  db.m = m;
  db.n = n;
  uint64_t key = 0;
  const uint64_t bits = digit_bits(n);
  for (uint64_t x = 0; x < m; ++x) key = with_digit(key, x, bits, n);
  db.amps.emplace(key, Amp{1, 0});
  return db;
}

uint64_t sparse_digit(const SparseDb& db, uint64_t key, uint64_t x) {
  if (x >= db.m) throw std::out_of_range("cell index out of range");
  return digit_at(key, x, digit_bits(db.n));
}

uint64_t sparse_pack(const SparseDb& db, std::span<const uint64_t> cells) {
  if (cells.size() != db.m) throw std::invalid_argument("cell list length must equal m");
  const uint64_t bits = digit_bits(db.n);
  uint64_t key = 0;
  for (uint64_t x = 0; x < db.m; ++x) {
    if (cells[x] > db.n) throw std::out_of_range("cell value out of alphabet");
    key = with_digit(key, x, bits, cells[x]);
  }
  return key;
}

std::vector<uint64_t> sparse_cells(const SparseDb& db, uint64_t key) {
  const uint64_t bits = digit_bits(db.n);
  std::vector<uint64_t> cells(db.m);
  for (uint64_t x = 0; x < db.m; ++x) cells[x] = digit_at(key, x, bits);
  return cells;
}

Amp sparse_amp_at(const SparseDb& db, std::span<const uint64_t> cells) {
  const auto it = db.amps.find(sparse_pack(db, cells));
  return it == db.amps.end() ? Amp{0, 0} : it->second;
}

double sparse_norm(const SparseDb& db) {
  double sq = 0;
  for (const auto& [key, amp] : db.amps) sq += std::norm(amp);
  return std::sqrt(sq);
}

void sparse_cpho(SparseDb& db, uint64_t x, uint64_t u) {
  if (x >= db.m) throw std::out_of_range("cell index out of range");
  if (u >= db.n) throw std::out_of_range("answer value out of range");
  if (u == 0) return;
  const uint64_t n = db.n;
  const uint64_t bits = digit_bits(n);
  const double inv_sqrt_n = 1.0 / std::sqrt(double(n));
  std::unordered_map<uint64_t, Amp> next;
  next.reserve(db.amps.size() * (n + 1));
  for (const auto& [key, amp] : db.amps) {
    const uint64_t g = digit_at(key, x, bits);
    if (g == n) {
      // Unsampled cell: the query samples it across the full range, with
      // the answer-dependent sign pattern.
      for (uint64_t y = 0; y < n; ++y) {
        const double sign = parity(u, y) ? -1.0 : 1.0;
        next[with_digit(key, x, bits, y)] += amp * (sign * inv_sqrt_n);
      }
    } else {
      // Previously sampled cell: partial un-sampling back to ⊥ plus a
      // redistribution over values.
      const double sd = parity(u, g) ? -1.0 : 1.0;
      next[with_digit(key, x, bits, n)] += amp * (sd * inv_sqrt_n);
      next[key] += amp * ((1.0 + sd * double(n - 2)) / double(n));
      for (uint64_t y = 0; y < n; ++y) {
        if (y == g) continue;
        const double sy = parity(u, y) ? -1.0 : 1.0;
        next[with_digit(key, x, bits, y)] += amp * ((1.0 - sy - sd) / double(n));
      }
    }
  }
  db.amps = std::move(next);
  const double nr = sparse_norm(db);
  if (std::abs(nr - 1.0) > 1e-10)
    throw std::runtime_error("sparse state norm drifted to " + std::to_string(nr));
}

double sparse_db_size_mass_above(const SparseDb& db, uint64_t t) {
  const uint64_t bits = digit_bits(db.n);
  double mass = 0;
  for (const auto& [key, amp] : db.amps) {
    uint64_t size = 0;
    for (uint64_t x = 0; x < db.m; ++x)
      if (digit_at(key, x, bits) != db.n) ++size;
    if (size > t) mass += std::norm(amp);
  }
  return mass;
}

double sparse_expected_labeled(const SparseDb& db, std::span<const uint64_t> lbl,
                               uint64_t ystar) {
  if (lbl.size() != db.m) throw std::invalid_argument("label table length must equal m");
  const uint64_t bits = digit_bits(db.n);
  double acc = 0;
  for (const auto& [key, amp] : db.amps) {
    uint64_t v = 0;
    for (uint64_t x = 0; x < db.m; ++x)
      if (lbl[x] == ystar && digit_at(key, x, bits) != db.n) ++v;
    acc += double(v) * std::norm(amp);
  }
  return acc;
}

double sparse_collision_mass(const SparseDb& db, std::span<const uint64_t> lbl,
                             uint64_t ystar) {
  if (lbl.size() != db.m) throw std::invalid_argument("label table length must equal m");
  const uint64_t bits = digit_bits(db.n);
  std::vector<uint64_t> seen(db.n);
  double mass = 0;
  for (const auto& [key, amp] : db.amps) {
    seen.assign(db.n, 0);
    bool collide = false;
    for (uint64_t x = 0; x < db.m && !collide; ++x) {
      if (lbl[x] != ystar) continue;
      const uint64_t g = digit_at(key, x, bits);
      if (g == db.n) continue;
      collide = ++seen[g] >= 2;
    }
    if (collide) mass += std::norm(amp);
  }
  return mass;
}

CapacityPoint capacity_vs_collision(uint64_t m, uint64_t n0, uint64_t t) {
  if (t > m) throw std::invalid_argument("cannot query more distinct cells than exist");
  SparseDb db = sparse_empty(m, n0);
  const std::vector<uint64_t> lbl(m, 0);
  CapacityPoint pt;
  pt.m = m;
  pt.n0 = n0;
  pt.t = t;
  for (uint64_t i = 0; i < t; ++i) {
    sparse_cpho(db, i, 1);
    pt.v_after.push_back(sparse_expected_labeled(db, lbl, 0));
  }
  for (double v : pt.v_after) pt.v_mean += v;
  if (t > 0) pt.v_mean /= double(t);
  pt.success = sparse_collision_mass(db, lbl, 0);
  pt.bound = 20.0 * double(t) * double(t) * pt.v_mean / double(n0);
  return pt;
}

}  // namespace ncl::q

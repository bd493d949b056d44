#include "ncl/tuples.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "ncl/prf.hpp"

namespace ncl {

bool tuple_valid(const OracleParams& p, const Tuple& t) {
  if (t.size() != p.ell) return false;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= p.m) return false;
    if (i > 0 && t[i] <= t[i - 1]) return false;
  }
  return true;
}

uint64_t tuple_index(const OracleParams& p, const Tuple& t) {
  if (t.size() != p.ell) throw std::invalid_argument("tuple_index: wrong arity");
  uint64_t idx = 0;
  for (uint64_t x : t) {
    if (x >= p.m) throw std::out_of_range("tuple_index: point outside [m]");
    idx = idx * p.m + x;
  }
  return idx;
}

Tuple tuple_from_index(const OracleParams& p, uint64_t index) {
  Tuple t(p.ell);
  for (uint32_t i = 0; i < p.ell; ++i) {
    t[p.ell - 1 - i] = index % p.m;
    index /= p.m;
  }
  if (index != 0) throw std::out_of_range("tuple_from_index: index outside [m^ell]");
  return t;
}

uint64_t tuple_sum(const OracleInstance& inst, QueryLedger& led, const Tuple& t) {
  const auto& p = inst.params();
  if (t.size() != p.ell) throw std::invalid_argument("tuple_sum: wrong arity");
  uint64_t s = 0;
  for (uint64_t x : t) s = (s + inst.query_h(led, x)) % p.n;
  return s;
}

static uint64_t sum_uncharged(const OracleInstance& inst, const Tuple& t) {
  uint64_t s = 0;
  for (uint64_t x : t) s = (s + inst.h_at(x)) % inst.params().n;
  return s;
}

bool verify_witness(const OracleInstance& inst, const Witness& w) {
  const auto& p = inst.params();
  if (!tuple_valid(p, w.a) || !tuple_valid(p, w.b)) return false;
  if (w.a == w.b) return false;
  if (w.y != p.y) return false;
  if (sum_uncharged(inst, w.a) != w.y || sum_uncharged(inst, w.b) != w.y) return false;
  uint64_t ga = inst.g_at(tuple_index(p, w.a));
  uint64_t gb = inst.g_at(tuple_index(p, w.b));
  return ga == gb && ga == w.gval;
}

void to_json(nlohmann::json& j, const Witness& w) {
  j = {{"a", w.a}, {"b", w.b}, {"y", w.y}, {"gval", w.gval}};
}

void from_json(const nlohmann::json& j, Witness& w) {
  j.at("a").get_to(w.a);
  j.at("b").get_to(w.b);
  j.at("y").get_to(w.y);
  j.at("gval").get_to(w.gval);
}

TupleSumIndex::TupleSumIndex(uint64_t n, uint32_t prefix_len)
    : n_(n), prefix_len_(prefix_len) {
  if (n < 1 || prefix_len < 1) throw std::invalid_argument("TupleSumIndex: bad shape");
}

void TupleSumIndex::insert(const Tuple& prefix, uint64_t partial_sum) {
  if (prefix.size() != prefix_len_)
    throw std::invalid_argument("TupleSumIndex: prefix arity mismatch");
  by_residue_[partial_sum % n_].push_back(prefix);
  ++count_;
}

const std::vector<Tuple>* TupleSumIndex::lookup(uint64_t residue) const {
  auto it = by_residue_.find(residue % n_);
  return it == by_residue_.end() ? nullptr : &it->second;
}

std::vector<Tuple> same_sum_tuples(std::span<const uint64_t> points,
                                   std::span<const uint64_t> vals,
                                   uint64_t n, uint32_t ell, uint64_t y,
                                   uint64_t limit) {
  if (points.size() != vals.size())
    throw std::invalid_argument("same_sum_tuples: points/vals size mismatch");
  for (size_t i = 1; i < points.size(); ++i)
    if (points[i] <= points[i - 1])
      throw std::invalid_argument("same_sum_tuples: points must be strictly increasing");
  std::vector<Tuple> out;
  if (ell == 0 || points.size() < ell || limit == 0) return out;

  if (ell == 1) {
    for (size_t i = 0; i < points.size(); ++i) {
      if (vals[i] % n == y % n) {
        out.push_back({points[i]});
        if (out.size() >= limit) return out;
      }
    }
    return out;
  }

  // Prefixes of length j with their partial sums, grown point by point in
  // ascending order so every stored prefix has max below the current point.
  // Walking points in ascending order and lists in creation order yields
  // colexicographic output.
  struct Entry {
    Tuple pts;
    uint64_t sum;
  };
  std::vector<std::vector<Entry>> lists(ell > 1 ? ell - 1 : 0);
  TupleSumIndex idx(n, ell - 1);

  for (size_t zi = 0; zi < points.size(); ++zi) {
    const uint64_t z = points[zi];
    const uint64_t hz = vals[zi] % n;

    const uint64_t need = (y % n + n - hz) % n;
    if (const auto* hits = idx.lookup(need)) {
      for (const Tuple& prefix : *hits) {
        Tuple t = prefix;
        t.push_back(z);
        out.push_back(std::move(t));
        if (out.size() >= limit) return out;
      }
    }

    // Extend snapshots only: subsets built this round already contain z.
    std::vector<size_t> snap(lists.size());
    for (size_t j = 0; j < lists.size(); ++j) snap[j] = lists[j].size();

    if (ell - 1 == 1) {
      idx.insert({z}, hz);
    } else {
      for (uint32_t j = ell - 2; j >= 1; --j) {
        for (size_t k = 0; k < snap[j - 1]; ++k) {
          Entry e = lists[j - 1][k];
          e.pts.push_back(z);
          e.sum = (e.sum + hz) % n;
          if (j == ell - 2)
            idx.insert(e.pts, e.sum);
          else
            lists[j].push_back(std::move(e));
        }
        if (j == 1) break;
      }
      lists[0].push_back({{z}, hz});
    }
  }
  return out;
}

std::vector<uint64_t> same_sum_counts(std::span<const uint64_t> vals,
                                      uint64_t n, uint32_t ell) {
  if (ell == 0) throw std::invalid_argument("same_sum_counts: ell must be >= 1");
  // cnt[j][r]: increasing j-subsets of the values seen so far with sum r.
  std::vector<std::vector<uint64_t>> cnt(ell + 1, std::vector<uint64_t>(n, 0));
  for (uint64_t v : vals) {
    uint64_t h = v % n;
    for (uint32_t j = ell; j >= 1; --j) {
      if (j == 1) {
        cnt[1][h] += 1;
      } else {
        for (uint64_t r = 0; r < n; ++r) {
          uint64_t c = cnt[j - 1][r];
          if (c) cnt[j][(r + h) % n] += c;
        }
      }
    }
  }
  return cnt[ell];
}

std::vector<Tuple> enumerate_same_sum_tuples(const OracleInstance& inst,
                                             QueryLedger& led,
                                             std::vector<uint64_t> points,
                                             uint64_t y,
                                             uint64_t limit) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<uint64_t> vals(points.size());
  for (size_t i = 0; i < points.size(); ++i) vals[i] = inst.query_h(led, points[i]);
  return same_sum_tuples(points, vals, inst.params().n, inst.params().ell, y, limit);
}

void write_tuples_csv(std::ostream& os, const OracleInstance& inst,
                      const std::vector<Tuple>& tuples) {
  const auto& p = inst.params();
  os << "# ncl.tuples.v1\n";
  os << "sum";
  for (uint32_t i = 1; i <= p.ell; ++i) os << ",x" << i;
  os << "\n";
  for (const Tuple& t : tuples) {
    os << sum_uncharged(inst, t);
    for (uint64_t x : t) os << "," << x;
    os << "\n";
  }
}

double binom(uint64_t t, uint64_t k) {
  if (k > t) return 0.0;
  double r = 1.0;
  for (uint64_t i = 0; i < k; ++i) r = r * double(t - i) / double(i + 1);
  return r;
}

CountStats count_statistics(const OracleParams& base, uint64_t t, uint64_t trials) {
  validate(base);
  if (t > base.m) throw std::invalid_argument("count_statistics: t exceeds m");
  if (trials == 0) throw std::invalid_argument("count_statistics: no trials");
  CountStats cs;
  cs.trials = trials;
  cs.expected_mean = binom(t, base.ell) / double(base.n);
  double mean = 0, m2 = 0;
  uint64_t tail = 0;
  for (uint64_t i = 0; i < trials; ++i) {
    OracleParams p = base;
    p.seed = derive_seed(base.seed, i);
    OracleInstance inst = OracleInstance::make(p);
    std::vector<uint64_t> vals(t);
    for (uint64_t x = 0; x < t; ++x) vals[x] = inst.h_at(x);
    uint64_t k = same_sum_counts(vals, p.n, p.ell)[p.y];
    if (double(k) <= cs.expected_mean / 2.0) ++tail;
    double d = double(k) - mean;
    mean += d / double(i + 1);
    m2 += d * (double(k) - mean);
  }
  cs.mean = mean;
  cs.variance = trials > 1 ? m2 / double(trials - 1) : 0.0;
  cs.tail_freq = double(tail) / double(trials);
  return cs;
}

}  // namespace ncl

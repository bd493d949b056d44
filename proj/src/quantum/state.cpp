#include "ncl/quantum/state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ncl::q {

namespace {

bool power_of_two(uint64_t v) { return v >= 1 && (v & (v - 1)) == 0; }

uint64_t checked_pow(uint64_t base, uint64_t exp, uint64_t cap) {
  uint64_t out = 1;
  for (uint64_t i = 0; i < exp; ++i) {
    if (out > cap / base) throw std::invalid_argument("register layout overflows the amplitude cap");
    out *= base;
  }
  return out;
}

}  // namespace

void validate(const RegisterLayout& l) {
  if (l.m < 1) throw std::invalid_argument("layout: m must be at least 1");
  if (l.n < 2 || !power_of_two(l.n))
    throw std::invalid_argument("layout: n must be a power of two, at least 2");
  if (l.dim_w < 1 || l.dim_r < 1)
    throw std::invalid_argument("layout: register dimensions must be positive");
  uint64_t db = checked_pow(cell_dim(l), l.m, max_amplitudes);
  uint64_t algo = l.m * l.n * l.dim_w * l.dim_r;
  if (algo > max_amplitudes / db)
    throw std::invalid_argument("layout: total dimension exceeds " +
                                std::to_string(max_amplitudes) + " amplitudes");
}

uint64_t cell_dim(const RegisterLayout& l) {
  return l.mode == DbMode::compressed ? l.n + 1 : l.n;
}

uint64_t db_dim(const RegisterLayout& l) {
  uint64_t out = 1;
  for (uint64_t i = 0; i < l.m; ++i) out *= cell_dim(l);
  return out;
}

uint64_t algo_dim(const RegisterLayout& l) { return l.m * l.n * l.dim_w * l.dim_r; }

uint64_t total_dim(const RegisterLayout& l) { return algo_dim(l) * db_dim(l); }

uint64_t cell_stride(const RegisterLayout& l, uint64_t x) {
  if (x >= l.m) throw std::out_of_range("cell index out of range");
  uint64_t out = 1;
  for (uint64_t i = x + 1; i < l.m; ++i) out *= cell_dim(l);
  return out;
}

uint64_t cell_value(const RegisterLayout& l, uint64_t d, uint64_t x) {
  return (d / cell_stride(l, x)) % cell_dim(l);
}

uint64_t db_index(const RegisterLayout& l, std::span<const uint64_t> cells) {
  if (cells.size() != l.m) throw std::invalid_argument("cell list length must equal m");
  uint64_t d = 0;
  for (uint64_t v : cells) {
    if (v >= cell_dim(l)) throw std::out_of_range("cell value out of alphabet");
    d = d * cell_dim(l) + v;
  }
  return d;
}

std::vector<uint64_t> db_cells(const RegisterLayout& l, uint64_t d) {
  std::vector<uint64_t> cells(l.m);
  for (uint64_t x = l.m; x-- > 0;) {
    cells[x] = d % cell_dim(l);
    d /= cell_dim(l);
  }
  return cells;
}

uint64_t algo_index(const RegisterLayout& l, const AlgoCoord& c) {
  if (c.x >= l.m || c.u >= l.n || c.w >= l.dim_w || c.r >= l.dim_r)
    throw std::out_of_range("algorithm coordinate out of range");
  return ((c.x * l.n + c.u) * l.dim_w + c.w) * l.dim_r + c.r;
}

uint64_t db_size(const RegisterLayout& l, uint64_t d) {
  if (l.mode != DbMode::compressed)
    throw std::invalid_argument("db_size is defined for compressed databases");
  uint64_t count = 0;
  for (uint64_t x = 0; x < l.m; ++x) {
    if (d % cell_dim(l) != bot_digit(l)) ++count;
    d /= cell_dim(l);
  }
  return count;
}

double norm(const Statevector& s) {
  double sq = 0;
  for (const Amp& a : s.amps) sq += std::norm(a);
  return std::sqrt(sq);
}

void check_norm(const Statevector& s, double tol) {
  double nr = norm(s);
  if (std::abs(nr - 1.0) > tol)
    throw std::runtime_error("state norm drifted to " + std::to_string(nr));
}

Statevector zero_state(const RegisterLayout& l) {
  validate(l);
  Statevector s;
  s.layout = l;
  s.amps.assign(total_dim(l), Amp{0, 0});
  return s;
}

Statevector basis_state(const RegisterLayout& l, const AlgoCoord& c,
                        std::span<const uint64_t> cells) {
  Statevector s = zero_state(l);
  s.amps[algo_index(l, c) * db_dim(l) + db_index(l, cells)] = Amp{1, 0};
  return s;
}

Statevector empty_db_state(const RegisterLayout& l, const AlgoCoord& c) {
  if (l.mode != DbMode::compressed)
    throw std::invalid_argument("empty database requires compressed mode");
  std::vector<uint64_t> cells(l.m, bot_digit(l));
  return basis_state(l, c, cells);
}

Statevector uniform_table_state(const RegisterLayout& l, const AlgoCoord& c) {
  if (l.mode != DbMode::standard)
    throw std::invalid_argument("uniform tables require standard mode");
  Statevector s = zero_state(l);
  const uint64_t dd = db_dim(l);
  const double amp = 1.0 / std::sqrt(double(dd));
  const uint64_t base = algo_index(l, c) * dd;
  for (uint64_t d = 0; d < dd; ++d) s.amps[base + d] = Amp{amp, 0};
  return s;
}

std::vector<double> algo_marginal(const Statevector& s) {
  const uint64_t dd = db_dim(s.layout);
  std::vector<double> out(algo_dim(s.layout), 0.0);
  for (uint64_t a = 0; a < out.size(); ++a)
    for (uint64_t d = 0; d < dd; ++d) out[a] += std::norm(s.amps[a * dd + d]);
  return out;
}

std::vector<double> db_marginal(const Statevector& s) {
  const uint64_t dd = db_dim(s.layout);
  std::vector<double> out(dd, 0.0);
  for (uint64_t a = 0; a < algo_dim(s.layout); ++a)
    for (uint64_t d = 0; d < dd; ++d) out[d] += std::norm(s.amps[a * dd + d]);
  return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distribution sizes differ");
  double acc = 0;
  for (size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return acc / 2;
}

double mass_with_db_size_above(const Statevector& s, uint64_t t) {
  const std::vector<double> probs = db_marginal(s);
  double mass = 0;
  for (uint64_t d = 0; d < probs.size(); ++d)
    if (db_size(s.layout, d) > t) mass += probs[d];
  return mass;
}

namespace {

void require_labels(const RegisterLayout& l, std::span<const uint64_t> lbl) {
  if (l.mode != DbMode::compressed)
    throw std::invalid_argument("capacity accounting requires compressed mode");
  if (lbl.size() != l.m) throw std::invalid_argument("label table length must equal m");
}

}  // namespace

double expected_labeled_entries(const Statevector& s,
                                std::span<const uint64_t> lbl, uint64_t ystar) {
  require_labels(s.layout, lbl);
  const std::vector<double> probs = db_marginal(s);
  double acc = 0;
  for (uint64_t d = 0; d < probs.size(); ++d) {
    if (probs[d] == 0) continue;
    uint64_t v = 0, rest = d;
    for (uint64_t x = s.layout.m; x-- > 0;) {
      uint64_t cell = rest % cell_dim(s.layout);
      rest /= cell_dim(s.layout);
      if (cell != bot_digit(s.layout) && lbl[x] == ystar) ++v;
    }
    acc += double(v) * probs[d];
  }
  return acc;
}

double collision_mass(const Statevector& s, std::span<const uint64_t> lbl,
                      uint64_t ystar) {
  require_labels(s.layout, lbl);
  const std::vector<double> probs = db_marginal(s);
  double mass = 0;
  std::vector<uint64_t> seen;
  for (uint64_t d = 0; d < probs.size(); ++d) {
    if (probs[d] == 0) continue;
    seen.assign(s.layout.n, 0);
    bool collide = false;
    uint64_t rest = d;
    for (uint64_t x = s.layout.m; x-- > 0 && !collide;) {
      uint64_t cell = rest % cell_dim(s.layout);
      rest /= cell_dim(s.layout);
      if (cell == bot_digit(s.layout) || lbl[x] != ystar) continue;
      collide = ++seen[cell] >= 2;
    }
    if (collide) mass += probs[d];
  }
  return mass;
}

}  // namespace ncl::q

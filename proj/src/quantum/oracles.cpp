#include "ncl/quantum/oracles.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace ncl::q {

namespace {

void require_mode(const Statevector& s, DbMode mode, const char* op) {
  if (s.layout.mode != mode)
    throw std::invalid_argument(std::string(op) + ": wrong database mode for this operator");
}

int parity(uint64_t a, uint64_t b) { return std::popcount(a & b) & 1; }

// Iterate basis indices grouped as (x, u, w·r, d); body(base, u_stride)
// receives the index of the u=0 member and the stride between u values.
template <typename Body>
void for_each_u_line(const RegisterLayout& l, Body body) {
  const uint64_t inner = l.dim_w * l.dim_r * db_dim(l);
  for (uint64_t x = 0; x < l.m; ++x) {
    const uint64_t base_x = x * l.n * inner;
    for (uint64_t t = 0; t < inner; ++t) body(base_x + t, inner);
  }
}

// XOR `mask(x, d)` into the answer register: swaps paired amplitudes.
template <typename Mask>
void xor_into_answer(Statevector& s, Mask mask) {
  const RegisterLayout& l = s.layout;
  const uint64_t dd = db_dim(l);
  const uint64_t wr = l.dim_w * l.dim_r;
  const uint64_t cd = cell_dim(l);
  for (uint64_t x = 0; x < l.m; ++x) {
    const uint64_t stride = cell_stride(l, x);
    for (uint64_t u = 0; u < l.n; ++u)
      for (uint64_t t = 0; t < wr; ++t) {
        const uint64_t base = ((x * l.n + u) * wr + t) * dd;
        for (uint64_t d = 0; d < dd; ++d) {
          const uint64_t v = mask(x, (d / stride) % cd);
          const uint64_t u2 = u ^ v;
          if (u2 <= u) continue;  // swap once per pair; v==0 is a no-op
          const uint64_t i = base + d;
          const uint64_t j = ((x * l.n + u2) * wr + t) * dd + d;
          std::swap(s.amps[i], s.amps[j]);
        }
      }
  }
  check_norm(s);
}

// Multiply amplitude by (−1)^{⟨u, value(cell)⟩} with ⊥ contributing +1.
template <typename Value>
void phase_by_cell(Statevector& s, Value value) {
  const RegisterLayout& l = s.layout;
  const uint64_t dd = db_dim(l);
  const uint64_t wr = l.dim_w * l.dim_r;
  const uint64_t cd = cell_dim(l);
  for (uint64_t x = 0; x < l.m; ++x) {
    const uint64_t stride = cell_stride(l, x);
    for (uint64_t u = 0; u < l.n; ++u)
      for (uint64_t t = 0; t < wr; ++t) {
        const uint64_t base = ((x * l.n + u) * wr + t) * dd;
        for (uint64_t d = 0; d < dd; ++d)
          if (parity(u, value(x, (d / stride) % cd))) s.amps[base + d] = -s.amps[base + d];
      }
  }
  check_norm(s);
}

// Rank-2 update on one cell axis for every database index sharing an
// algorithm prefix: |⊥⟩ ↔ uniform, identity on balanced phase vectors.
void decomp_cell_block(Statevector& s, uint64_t base_a, uint64_t stride,
                       uint64_t cd, uint64_t n, double inv_sqrt_n) {
  const uint64_t dd = db_dim(s.layout);
  const uint64_t hi_count = dd / (stride * cd);
  for (uint64_t h = 0; h < hi_count; ++h)
    for (uint64_t lo = 0; lo < stride; ++lo) {
      const uint64_t base = base_a + h * cd * stride + lo;
      const Amp bot = s.amps[base + n * stride];
      Amp b{0, 0};
      for (uint64_t y = 0; y < n; ++y) b += s.amps[base + y * stride];
      b *= inv_sqrt_n;
      const Amp delta = (bot - b) * inv_sqrt_n;
      for (uint64_t y = 0; y < n; ++y) s.amps[base + y * stride] += delta;
      s.amps[base + n * stride] = b;
    }
}

}  // namespace

void apply_sto(Statevector& s) {
  require_mode(s, DbMode::standard, "sto");
  xor_into_answer(s, [](uint64_t, uint64_t cell) { return cell; });
}

void apply_pho(Statevector& s) {
  require_mode(s, DbMode::standard, "pho");
  phase_by_cell(s, [](uint64_t, uint64_t cell) { return cell; });
}

void apply_hao(Statevector& s) {
  require_mode(s, DbMode::standard, "hao");
  const RegisterLayout& l = s.layout;
  const uint64_t dd = db_dim(l);
  const uint64_t wr = l.dim_w * l.dim_r;
  const uint64_t cd = cell_dim(l);
  for (uint64_t x = 0; x < l.m; ++x) {
    const uint64_t stride = cell_stride(l, x);
    for (uint64_t u = 1; u < l.n; ++u)
      for (uint64_t t = 0; t < wr; ++t) {
        const uint64_t base = ((x * l.n + u) * wr + t) * dd;
        for (uint64_t d = 0; d < dd; ++d) {
          const uint64_t cell = (d / stride) % cd;
          const uint64_t cell2 = cell ^ u;
          if (cell2 <= cell) continue;
          const uint64_t d2 = d + (cell2 - cell) * stride;
          std::swap(s.amps[base + d], s.amps[base + d2]);
        }
      }
  }
  check_norm(s);
}

void apply_v(Statevector& s) {
  const RegisterLayout& l = s.layout;
  const uint64_t n = l.n;
  const double scale = 1.0 / std::sqrt(double(n));
  std::vector<Amp> buf(n);
  for_each_u_line(l, [&](uint64_t base, uint64_t stride) {
    for (uint64_t u = 0; u < n; ++u) buf[u] = s.amps[base + u * stride];
    for (uint64_t len = 1; len < n; len <<= 1)
      for (uint64_t i = 0; i < n; i += len << 1)
        for (uint64_t j = i; j < i + len; ++j) {
          const Amp a = buf[j];
          const Amp b = buf[j + len];
          buf[j] = a + b;
          buf[j + len] = a - b;
        }
    for (uint64_t u = 0; u < n; ++u) s.amps[base + u * stride] = buf[u] * scale;
  });
  check_norm(s);
}

void apply_csto_raw(Statevector& s) {
  require_mode(s, DbMode::compressed, "csto");
  const uint64_t bot = bot_digit(s.layout);
  xor_into_answer(s, [bot](uint64_t, uint64_t cell) { return cell == bot ? 0 : cell; });
}

void apply_cpho_raw(Statevector& s) {
  require_mode(s, DbMode::compressed, "cpho");
  const uint64_t bot = bot_digit(s.layout);
  phase_by_cell(s, [bot](uint64_t, uint64_t cell) { return cell == bot ? 0 : cell; });
}

void apply_std_decomp_at(Statevector& s, uint64_t x) {
  require_mode(s, DbMode::compressed, "decomp");
  const RegisterLayout& l = s.layout;
  const uint64_t stride = cell_stride(l, x);
  const uint64_t cd = cell_dim(l);
  const double inv = 1.0 / std::sqrt(double(l.n));
  const uint64_t dd = db_dim(l);
  for (uint64_t a = 0; a < algo_dim(l); ++a)
    decomp_cell_block(s, a * dd, stride, cd, l.n, inv);
  check_norm(s);
}

void apply_std_decomp(Statevector& s) {
  require_mode(s, DbMode::compressed, "decomp");
  const RegisterLayout& l = s.layout;
  const uint64_t cd = cell_dim(l);
  const double inv = 1.0 / std::sqrt(double(l.n));
  const uint64_t dd = db_dim(l);
  const uint64_t per_x = l.n * l.dim_w * l.dim_r;
  for (uint64_t x = 0; x < l.m; ++x) {
    const uint64_t stride = cell_stride(l, x);
    for (uint64_t a = x * per_x; a < (x + 1) * per_x; ++a)
      decomp_cell_block(s, a * dd, stride, cd, l.n, inv);
  }
  check_norm(s);
}

void apply_csto(Statevector& s) {
  apply_std_decomp(s);
  apply_csto_raw(s);
  apply_std_decomp(s);
}

void apply_cpho(Statevector& s) {
  apply_std_decomp(s);
  apply_cpho_raw(s);
  apply_std_decomp(s);
}

void decompress_all(Statevector& s) {
  for (uint64_t x = 0; x < s.layout.m; ++x) apply_std_decomp_at(s, x);
}

void apply_algo_unitary(Statevector& s, const Eigen::MatrixXcd& u) {
  const uint64_t ad = algo_dim(s.layout);
  const uint64_t dd = db_dim(s.layout);
  if (u.rows() != Eigen::Index(ad) || u.cols() != Eigen::Index(ad))
    throw std::invalid_argument("unitary size does not match the algorithm registers");
  using RowMat = Eigen::Matrix<Amp, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMat> mat(s.amps.data(), Eigen::Index(ad), Eigen::Index(dd));
  mat = u * mat;
  check_norm(s);
}

Eigen::MatrixXcd random_unitary(uint64_t dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd z(dim, dim);
  for (uint64_t i = 0; i < dim; ++i)
    for (uint64_t j = 0; j < dim; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z(Eigen::Index(i), Eigen::Index(j)) = Amp(re, im);
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (uint64_t k = 0; k < dim; ++k) {
    const Amp diag = r(Eigen::Index(k), Eigen::Index(k));
    const double mag = std::abs(diag);
    q.col(Eigen::Index(k)) *= (mag == 0 ? Amp{1, 0} : diag / mag);
  }
  return q;
}

Eigen::MatrixXcd operator_matrix(const RegisterLayout& l,
                                 const std::function<void(Statevector&)>& op) {
  validate(l);
  const uint64_t dim = total_dim(l);
  Eigen::MatrixXcd out(dim, dim);
  for (uint64_t j = 0; j < dim; ++j) {
    Statevector s = zero_state(l);
    s.amps[j] = Amp{1, 0};
    op(s);
    for (uint64_t i = 0; i < dim; ++i) out(Eigen::Index(i), Eigen::Index(j)) = s.amps[i];
  }
  return out;
}

namespace {

constexpr std::pair<CircuitOp::Kind, const char*> kind_names[] = {
    {CircuitOp::Kind::sto, "sto"},       {CircuitOp::Kind::pho, "pho"},
    {CircuitOp::Kind::csto, "csto"},     {CircuitOp::Kind::cpho, "cpho"},
    {CircuitOp::Kind::hao, "hao"},       {CircuitOp::Kind::decomp, "decomp"},
    {CircuitOp::Kind::local, "local"},
};

}  // namespace

void to_json(nlohmann::json& j, const CircuitOp& op) {
  for (const auto& [kind, name] : kind_names)
    if (kind == op.kind) {
      j = nlohmann::json{{"op", name}};
      break;
    }
  if (op.kind == CircuitOp::Kind::decomp) j["x"] = op.x;
  if (op.kind == CircuitOp::Kind::local) j["seed"] = op.seed;
}

void from_json(const nlohmann::json& j, CircuitOp& op) {
  const std::string name = j.at("op").get<std::string>();
  bool found = false;
  for (const auto& [kind, kname] : kind_names)
    if (name == kname) {
      op.kind = kind;
      found = true;
      break;
    }
  if (!found) throw std::invalid_argument("unknown circuit op: " + name);
  op.x = j.value("x", uint64_t{0});
  op.seed = j.value("seed", uint64_t{0});
}

void apply_op(Statevector& s, const CircuitOp& op) {
  switch (op.kind) {
    case CircuitOp::Kind::sto: apply_sto(s); return;
    case CircuitOp::Kind::pho: apply_pho(s); return;
    case CircuitOp::Kind::csto: apply_csto(s); return;
    case CircuitOp::Kind::cpho: apply_cpho(s); return;
    case CircuitOp::Kind::hao: apply_hao(s); return;
    case CircuitOp::Kind::decomp: apply_std_decomp_at(s, op.x); return;
    case CircuitOp::Kind::local:
      apply_algo_unitary(s, random_unitary(algo_dim(s.layout), op.seed));
      return;
  }
  throw std::invalid_argument("unknown circuit op kind");
}

void run_circuit(Statevector& s, const Circuit& c) {
  for (const CircuitOp& op : c) apply_op(s, op);
}

Circuit random_circuit(uint64_t queries, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Circuit c;
  for (uint64_t t = 0; t < queries; ++t) {
    c.push_back({CircuitOp::Kind::local, 0, rng()});
    c.push_back({CircuitOp::Kind::sto, 0, 0});
  }
  c.push_back({CircuitOp::Kind::local, 0, rng()});
  return c;
}

double equivalence_tv(const RegisterLayout& l, const Circuit& c) {
  if (l.mode != DbMode::standard)
    throw std::invalid_argument("equivalence runs start from a plain-mode layout");
  RegisterLayout lc = l;
  lc.mode = DbMode::compressed;
  validate(lc);
  Statevector plain = uniform_table_state(l);
  Statevector lazy = empty_db_state(lc);
  for (const CircuitOp& op : c) {
    switch (op.kind) {
      case CircuitOp::Kind::sto:
        apply_sto(plain);
        apply_v(lazy);
        apply_cpho(lazy);
        apply_v(lazy);
        break;
      case CircuitOp::Kind::pho:
        apply_pho(plain);
        apply_cpho(lazy);
        break;
      case CircuitOp::Kind::local: {
        const Eigen::MatrixXcd u = random_unitary(algo_dim(l), op.seed);
        apply_algo_unitary(plain, u);
        apply_algo_unitary(lazy, u);
        break;
      }
      default:
        throw std::invalid_argument("equivalence circuits may contain only sto/pho/local ops");
    }
  }
  const std::vector<double> mp = algo_marginal(plain);
  const std::vector<double> mq = algo_marginal(lazy);
  return tv_distance(mp, mq);
}

}  // namespace ncl::q

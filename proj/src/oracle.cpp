#include "ncl/oracle.hpp"

#include <stdexcept>
#include <string>

#include "ncl/prf.hpp"

namespace ncl {

uint64_t tuple_space(const OracleParams& p) {
  uint64_t space = 1;
  for (uint32_t i = 0; i < p.ell; ++i) {
    if (p.m != 0 && space > (uint64_t{1} << 62) / p.m)
      throw std::invalid_argument("oracle params: m^ell does not fit the index type");
    space *= p.m;
  }
  return space;
}

void validate(const OracleParams& p) {
  if (p.m < 2 || p.n < 2 || p.n0 < 2)
    throw std::invalid_argument("oracle params: m, n, n0 must all be >= 2");
  if (p.ell < 1) throw std::invalid_argument("oracle params: ell must be >= 1");
  if (p.y >= p.n) throw std::invalid_argument("oracle params: y must lie in [0, n)");
  if (p.m < p.ell)
    throw std::invalid_argument(
        "oracle params: no strictly increasing ell-tuple exists (m < ell)");
  tuple_space(p);
}

OracleInstance OracleInstance::make(const OracleParams& p) {
  validate(p);
  OracleInstance inst;
  inst.p_ = p;
  inst.tuple_space_ = tuple_space(p);
  return inst;
}

OracleInstance OracleInstance::from_tables(const OracleParams& p,
                                           std::vector<uint64_t> h,
                                           std::vector<uint64_t> g) {
  validate(p);
  OracleInstance inst;
  inst.p_ = p;
  inst.tuple_space_ = tuple_space(p);
  if (h.size() != p.m || g.size() != inst.tuple_space_)
    throw std::invalid_argument("from_tables: table sizes must be m and m^ell");
  for (uint64_t v : h)
    if (v >= p.n) throw std::invalid_argument("from_tables: H value out of range");
  for (uint64_t v : g)
    if (v >= p.n0) throw std::invalid_argument("from_tables: G value out of range");
  inst.fixed_ = true;
  inst.h_table_ = std::move(h);
  inst.g_table_ = std::move(g);
  return inst;
}

uint64_t OracleInstance::h_at(uint64_t x) const {
  if (x >= p_.m) throw std::out_of_range("H query at x >= m");
  if (fixed_) return h_table_[x];
  return keyed_uniform(p_.seed, tag::point_oracle, x, p_.n);
}

uint64_t OracleInstance::g_at(uint64_t tuple_index) const {
  if (tuple_index >= tuple_space_) throw std::out_of_range("G query outside [m^ell]");
  if (fixed_) return g_table_[tuple_index];
  return keyed_uniform(p_.seed, tag::tuple_oracle, tuple_index, p_.n0);
}

uint64_t OracleInstance::query_h(QueryLedger& led, uint64_t x) const {
  uint64_t v = h_at(x);
  ++led.t_h;
  return v;
}

uint64_t OracleInstance::query_g(QueryLedger& led, uint64_t tuple_index) const {
  uint64_t v = g_at(tuple_index);
  ++led.t_g;
  return v;
}

FlipMemory::FlipMemory(uint64_t reply_range, uint64_t seed)
    : range_(reply_range), seed_(seed) {
  if (reply_range < 2) throw std::invalid_argument("FlipMemory: reply range must be >= 2");
}

uint64_t FlipMemory::flip(QueryLedger& led, uint64_t tuple_index) {
  ++led.t_flip;
  auto [it, fresh] = replies_.try_emplace(tuple_index, 0);
  if (fresh) it->second = keyed_uniform(seed_, tag::flip_reply, tuple_index, range_);
  if (!flipped_.erase(tuple_index)) flipped_.insert(tuple_index);
  return it->second;
}

bool FlipMemory::is_set(uint64_t tuple_index) const {
  return flipped_.count(tuple_index) != 0;
}

void to_json(nlohmann::json& j, const OracleParams& p) {
  j = {{"M", p.m}, {"N", p.n}, {"N0", p.n0}, {"ell", p.ell}, {"y", p.y}, {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, OracleParams& p) {
  j.at("M").get_to(p.m);
  j.at("N").get_to(p.n);
  j.at("N0").get_to(p.n0);
  j.at("ell").get_to(p.ell);
  j.at("y").get_to(p.y);
  j.at("seed").get_to(p.seed);
}

void to_json(nlohmann::json& j, const QueryLedger& l) {
  j = {{"t_h", l.t_h}, {"t_g", l.t_g}, {"t_flip", l.t_flip}, {"s_bits", l.s_bits}};
}

void from_json(const nlohmann::json& j, QueryLedger& l) {
  j.at("t_h").get_to(l.t_h);
  j.at("t_g").get_to(l.t_g);
  j.at("t_flip").get_to(l.t_flip);
  j.at("s_bits").get_to(l.s_bits);
}

nlohmann::json instance_record(const OracleParams& p, const QueryLedger& l) {
  return {{"params", p}, {"ledger", l}};
}

}  // namespace ncl

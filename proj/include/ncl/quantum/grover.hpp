#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>

namespace ncl::q {

// ⌊(π/4)·√(domain/marked_estimate)⌋ amplification rounds; 0 when the
// estimate already covers the domain.  Throws on an empty domain or a zero
// estimate.
uint64_t grover_iterations(uint64_t domain, uint64_t marked_estimate);

// sin²((2k+1)·asin√(marked/domain)): exact success probability of k rounds
// with `marked` elements marked out of `domain`.
double grover_success_closed_form(uint64_t domain, uint64_t marked, uint64_t k);

struct GroverResult {
  uint64_t candidate = 0;   // Born-sampled element of the domain
  bool hit = false;         // predicate(candidate)
  uint64_t iterations = 0;
  uint64_t marked = 0;      // exact marked count
  double success_prob = 0;  // exact marked-set mass before sampling
};

// Dense real-amplitude amplification over [domain]: uniform start, each
// round flips the sign of marked elements and inverts about the mean, then
// one Born sample.  The predicate is evaluated once per element to build
// the mark table.  Throws on an empty domain.
GroverResult grover_search(uint64_t domain,
                           const std::function<bool(uint64_t)>& predicate,
                           uint64_t iterations, uint64_t seed);

// Index drawn from an unnormalized weight vector; deterministic in the
// generator state (no reliance on distribution internals).
uint64_t born_sample(std::span<const double> probs, std::mt19937_64& rng);

}  // namespace ncl::q

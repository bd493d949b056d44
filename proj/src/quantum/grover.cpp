#include "ncl/quantum/grover.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ncl::q {

uint64_t grover_iterations(uint64_t domain, uint64_t marked_estimate) {
  if (domain == 0) throw std::invalid_argument("search domain is empty");
  if (marked_estimate == 0)
    throw std::invalid_argument("marked-count estimate must be positive");
  if (marked_estimate >= domain) return 0;
  const double ratio = double(domain) / double(marked_estimate);
  return uint64_t(std::floor(std::numbers::pi / 4.0 * std::sqrt(ratio)));
}

double grover_success_closed_form(uint64_t domain, uint64_t marked, uint64_t k) {
  if (domain == 0) throw std::invalid_argument("search domain is empty");
  if (marked == 0) return 0.0;
  if (marked >= domain) return 1.0;
  const double theta = std::asin(std::sqrt(double(marked) / double(domain)));
  const double s = std::sin(double(2 * k + 1) * theta);
  return s * s;
}

uint64_t born_sample(std::span<const double> probs, std::mt19937_64& rng) {
  if (probs.empty()) throw std::invalid_argument("cannot sample an empty distribution");
  double total = 0;
  for (double p : probs) total += p;
  if (total <= 0) throw std::invalid_argument("weights must have positive total");
  const double u = double(rng() >> 11) * 0x1.0p-53 * total;
  double acc = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

GroverResult grover_search(uint64_t domain,
                           const std::function<bool(uint64_t)>& predicate,
                           uint64_t iterations, uint64_t seed) {
  if (domain == 0) throw std::invalid_argument("search domain is empty");
  std::vector<char> marked(domain);
  uint64_t marked_count = 0;
  for (uint64_t i = 0; i < domain; ++i) {
    marked[i] = predicate(i) ? 1 : 0;
    marked_count += marked[i];
  }
  std::vector<double> amps(domain, 1.0 / std::sqrt(double(domain)));
  for (uint64_t k = 0; k < iterations; ++k) {
    double sum = 0;
    for (uint64_t i = 0; i < domain; ++i) {
      if (marked[i]) amps[i] = -amps[i];
      sum += amps[i];
    }
    const double mean = sum / double(domain);
    for (uint64_t i = 0; i < domain; ++i) amps[i] = 2.0 * mean - amps[i];
  }
  GroverResult res;
  res.iterations = iterations;
  res.marked = marked_count;
  std::vector<double> probs(domain);
  for (uint64_t i = 0; i < domain; ++i) {
    probs[i] = amps[i] * amps[i];
    if (marked[i]) res.success_prob += probs[i];
  }
  std::mt19937_64 rng(seed);
  res.candidate = born_sample(probs, rng);
  res.hit = marked[res.candidate] != 0;
  return res;
}

}  // namespace ncl::q

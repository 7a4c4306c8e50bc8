#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dialpol::ad {

// Seeded generator. The engine is std::mt19937_64, whose output sequence is
// fixed by the C++ standard; every conversion to floats or bounded integers
// is done here (never through <random> distributions, which are
// implementation-defined), so a seed yields the same draws on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1): draws are clamped to [eps, 1 - eps] with eps the
  // double machine epsilon.
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // Independent child stream for a named component.
  Rng split(std::string_view tag) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

}  // namespace dialpol::ad

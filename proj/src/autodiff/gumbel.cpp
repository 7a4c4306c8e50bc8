#include "dialpol/autodiff/gumbel.hpp"

#include <cmath>
#include <stdexcept>

namespace dialpol::ad {

double gumbel_from_uniform(double u) { return -std::log(-std::log(u)); }

Tensor gumbel_sample(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("gumbel_sample: n must be >= 1");
  Tensor out({n});
  for (std::size_t i = 0; i < n; ++i) out[i] = gumbel_from_uniform(rng.uniform_open());
  return out;
}

Var gumbel_softmax(Var log_p, double tau, const Tensor& noise, std::size_t group) {
  if (!(tau > 0.0)) throw std::invalid_argument("gumbel_softmax: tau must be positive");
  if (noise.size() != log_p.value().size()) {
    throw ShapeError("gumbel_softmax", to_string(log_p.shape()) + " vs noise " + to_string(noise.shape()));
  }
  Graph& g = *log_p.graph;
  Tensor shaped(log_p.shape(), noise.values());
  Var perturbed = add(log_p, g.constant(std::move(shaped)));
  return softmax(scale(perturbed, 1.0 / tau), group);
}

Var gumbel_softmax(Var log_p, double tau, Rng& rng, std::size_t group) {
  return gumbel_softmax(log_p, tau, gumbel_sample(rng, log_p.value().size()), group);
}

}  // namespace dialpol::ad

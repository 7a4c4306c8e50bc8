#pragma once

#include <cstddef>

#include "dialpol/autodiff/graph.hpp"
#include "dialpol/autodiff/rng.hpp"

namespace dialpol::ad {

// Standard Gumbel draw from a uniform u in (0, 1): -log(-log(u)).
double gumbel_from_uniform(double u);

// n i.i.d. Gumbel(0, 1) samples, shape [n]. Uniforms come from
// Rng::uniform_open, so no sample is infinite.
Tensor gumbel_sample(Rng& rng, std::size_t n);

// Gumbel-Softmax relaxation over column groups of width `group`:
//   y_i = softmax((log_p_i + g_i) / tau)
// `noise` must match log_p's shape; pass zeros to get plain softmax(log_p / tau).
Var gumbel_softmax(Var log_p, double tau, const Tensor& noise, std::size_t group = 0);
Var gumbel_softmax(Var log_p, double tau, Rng& rng, std::size_t group = 0);

}  // namespace dialpol::ad

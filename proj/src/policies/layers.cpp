#include "dialpol/policies/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace dialpol::policies {

namespace {

ad::Tensor uniform_tensor(ad::Shape shape, double bound, ad::Rng& rng) {
  ad::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

ad::Var activate(ad::Var x, Activation act) {
  switch (act) {
    case Activation::relu:
      return ad::relu(x);
    case Activation::tanh:
      return ad::tanh(x);
    case Activation::sigmoid:
      return ad::sigmoid(x);
    case Activation::none:
      break;
  }
  return x;
}

Linear::Linear(std::string name, std::size_t in, std::size_t out, ad::Rng& rng) {
  if (in == 0 || out == 0) throw std::invalid_argument("linear layer '" + name + "' needs positive widths");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight_ = {name + ".weight", uniform_tensor({in, out}, bound, rng)};
  bias_ = {name + ".bias", uniform_tensor({1, out}, bound, rng)};
}

ad::Var Linear::operator()(ad::Graph& g, ad::Var x) {
  return ad::add(ad::matmul(x, g.parameter(weight_)), g.parameter(bias_));
}

void Linear::parameters(std::vector<ad::Parameter*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

Mlp::Mlp(const std::string& name, const std::vector<std::size_t>& widths, Activation hidden, Activation output,
         ad::Rng& rng)
    : hidden_(hidden), output_(output) {
  if (widths.size() < 2) throw std::invalid_argument("mlp '" + name + "' needs at least two widths");
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    layers_.emplace_back(name + "." + std::to_string(i), widths[i], widths[i + 1], rng);
  }
}

ad::Var Mlp::operator()(ad::Graph& g, ad::Var x) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i](g, x);
    x = activate(x, i + 1 < layers_.size() ? hidden_ : output_);
  }
  return x;
}

void Mlp::parameters(std::vector<ad::Parameter*>& out) {
  for (auto& l : layers_) l.parameters(out);
}

Embedding::Embedding(std::string name, std::size_t rows, std::size_t dim, ad::Rng& rng)
    : table_{std::move(name), uniform_tensor({rows, dim}, std::sqrt(3.0), rng)} {}

ad::Var Embedding::operator()(ad::Graph& g, std::vector<std::size_t> ids) {
  return ad::gather_rows(g.parameter(table_), std::move(ids));
}

GruCell::GruCell(const std::string& name, std::size_t in, std::size_t hidden, ad::Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  w_ih_ = {name + ".w_ih", uniform_tensor({in, 3 * hidden}, bound, rng)};
  w_hh_ = {name + ".w_hh", uniform_tensor({hidden, 3 * hidden}, bound, rng)};
  b_ih_ = {name + ".b_ih", uniform_tensor({1, 3 * hidden}, bound, rng)};
  b_hh_ = {name + ".b_hh", uniform_tensor({1, 3 * hidden}, bound, rng)};
}

ad::Var GruCell::operator()(ad::Graph& g, ad::Var x, ad::Var h) {
  const std::size_t n = hidden();
  auto gi = ad::add(ad::matmul(x, g.parameter(w_ih_)), g.parameter(b_ih_));
  auto gh = ad::add(ad::matmul(h, g.parameter(w_hh_)), g.parameter(b_hh_));
  auto r = ad::sigmoid(ad::add(ad::slice(gi, 0, n), ad::slice(gh, 0, n)));
  auto z = ad::sigmoid(ad::add(ad::slice(gi, n, 2 * n), ad::slice(gh, n, 2 * n)));
  auto cand = ad::tanh(ad::add(ad::slice(gi, 2 * n, 3 * n), ad::mul(r, ad::slice(gh, 2 * n, 3 * n))));
  return ad::add(cand, ad::mul(z, ad::sub(h, cand)));
}

void GruCell::parameters(std::vector<ad::Parameter*>& out) {
  out.push_back(&w_ih_);
  out.push_back(&w_hh_);
  out.push_back(&b_ih_);
  out.push_back(&b_hh_);
}

std::size_t count_params(const std::vector<ad::Parameter*>& params) {
  std::size_t n = 0;
  for (const auto* p : params) n += p->value.size();
  return n;
}

}  // namespace dialpol::policies

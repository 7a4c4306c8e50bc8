#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dialpol/autodiff/graph.hpp"
#include "dialpol/autodiff/rng.hpp"

namespace dialpol::policies {

enum class Activation { none, relu, tanh, sigmoid };

ad::Var activate(ad::Var x, Activation act);

// Affine map x W + b with W [in x out] and b [1 x out]. Weights and biases
// start uniform on +-1/sqrt(in).
class Linear {
 public:
  Linear() = default;
  Linear(std::string name, std::size_t in, std::size_t out, ad::Rng& rng);

  ad::Var operator()(ad::Graph& g, ad::Var x);
  std::size_t in() const { return weight_.value.rows(); }
  std::size_t out() const { return weight_.value.cols(); }
  void parameters(std::vector<ad::Parameter*>& out);
  ad::Parameter& weight() { return weight_; }
  ad::Parameter& bias() { return bias_; }

 private:
  ad::Parameter weight_;
  ad::Parameter bias_;
};

// Stack of Linear layers; `hidden` between layers, `output` after the last.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const std::string& name, const std::vector<std::size_t>& widths, Activation hidden, Activation output,
      ad::Rng& rng);

  ad::Var operator()(ad::Graph& g, ad::Var x);
  void parameters(std::vector<ad::Parameter*>& out);
  std::vector<Linear>& layers() { return layers_; }
  std::size_t in() const { return layers_.front().in(); }
  std::size_t out() const { return layers_.back().out(); }

 private:
  std::vector<Linear> layers_;
  Activation hidden_ = Activation::relu;
  Activation output_ = Activation::none;
};

class Embedding {
 public:
  Embedding() = default;
  // Entries start standard-normal-like: uniform on +-sqrt(3).
  Embedding(std::string name, std::size_t rows, std::size_t dim, ad::Rng& rng);

  ad::Var operator()(ad::Graph& g, std::vector<std::size_t> ids);
  void parameters(std::vector<ad::Parameter*>& out) { out.push_back(&table_); }
  std::size_t rows() const { return table_.value.rows(); }
  std::size_t dim() const { return table_.value.cols(); }

 private:
  ad::Parameter table_;
};

// Gated recurrent unit with separate input and hidden biases:
//   r = sig(x Wr + br + h Ur + cr), z = sig(x Wz + bz + h Uz + cz)
//   n = tanh(x Wn + bn + r * (h Un + cn)), h' = (1 - z) * n + z * h
// Gate blocks are laid out [r | z | n] along the columns.
class GruCell {
 public:
  GruCell() = default;
  GruCell(const std::string& name, std::size_t in, std::size_t hidden, ad::Rng& rng);

  ad::Var operator()(ad::Graph& g, ad::Var x, ad::Var h);
  void parameters(std::vector<ad::Parameter*>& out);
  std::size_t hidden() const { return w_hh_.value.rows(); }

 private:
  ad::Parameter w_ih_, w_hh_, b_ih_, b_hh_;
};

std::size_t count_params(const std::vector<ad::Parameter*>& params);

}  // namespace dialpol::policies

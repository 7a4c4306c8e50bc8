#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dialpol/autodiff/tensor.hpp"

namespace dialpol::ad {

// A named trainable tensor owned by a model.
struct Parameter {
  std::string name;
  Tensor value;
};

class Graph;

// Handle to a node of a Graph.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
};

// Reverse-mode tape. Nodes are appended in evaluation order and the backward
// pass walks them in exact reverse insertion order, summing gradient
// contributions into each input.
class Graph {
 public:
  enum class Mode { training, inference };
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  explicit Graph(Mode mode = Mode::training) : mode_(mode) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Mode mode() const { return mode_; }
  bool recording() const { return mode_ == Mode::training; }

  // Input that never receives a gradient.
  Var constant(Tensor value);
  // Leaf that receives a gradient (a free input of a test, say).
  Var leaf(Tensor value);
  // Leaf bound to a model parameter; repeated calls return the same node.
  Var parameter(Parameter& p);

  // Appends an op node. `fn` may be empty for non-differentiable outputs.
  Var record(std::string_view op, Tensor value, std::vector<Var> inputs, BackwardFn fn);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_[id].inputs; }

  // Gradient of the last backward() target w.r.t. `v`; zeros if untouched.
  Tensor grad(Var v) const;
  // Mutable accumulator for node `id` (allocated as zeros on first use).
  Tensor& grad_buffer(std::size_t id);
  const Tensor& grad_of(std::size_t id) const { return nodes_[id].grad; }

  void backward(Var loss);

  // Gradients for `params` in order; zeros for parameters never bound.
  std::vector<Tensor> gradients(std::span<Parameter* const> params) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    std::string op;
    Tensor value;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Tensor grad;
    bool requires_grad = false;
  };

  Var push(Node node);

  Mode mode_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> bound_;
};

// ---- ops -------------------------------------------------------------------
// Binary elementwise ops accept equal shapes, or a single-row `b` that is
// broadcast across the rows of `a` (bias add).

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double c);

Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var exp(Var a);
Var log(Var a);
Var sqrt(Var a);

// Softmax / log-softmax over contiguous column groups of width `group`
// (0 means the whole row).
Var softmax(Var a, std::size_t group = 0);
Var log_softmax(Var a, std::size_t group = 0);

// Forward value is the one-hot argmax of each group (lowest index wins
// ties); the backward pass is the identity, so gradients flow as if the
// output were `y`.
Var straight_through(Var y, std::size_t group = 0);

Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
Var slice(Var a, std::size_t begin, std::size_t end);
// Row i of the result is row indices[i] of `table`.
Var gather_rows(Var table, std::vector<std::size_t> indices);

Var sum(Var a);
Var mean(Var a);
// Per-row sum, shape [rows, 1].
Var row_sum(Var a);

// Mean over all elements of the numerically stable binary cross-entropy
// between sigmoid(logits) and `targets`.
Var bce_with_logits(Var logits, const Tensor& targets);

}  // namespace dialpol::ad

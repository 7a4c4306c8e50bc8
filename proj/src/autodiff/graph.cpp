#include "dialpol/autodiff/graph.hpp"

namespace dialpol::ad {

const Tensor& Var::value() const { return graph->value(*this); }

Var Graph::push(Node node) {
  if (!node.value.all_finite()) throw NonFiniteError(node.op);
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Graph::constant(Tensor value) {
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  return push(std::move(n));
}

Var Graph::leaf(Tensor value) {
  Node n;
  n.op = "leaf";
  n.value = std::move(value);
  n.requires_grad = recording();
  return push(std::move(n));
}

Var Graph::parameter(Parameter& p) {
  if (auto it = bound_.find(&p); it != bound_.end()) return Var{this, it->second};
  Node n;
  n.op = "parameter:" + p.name;
  n.value = p.value;
  n.requires_grad = recording();
  Var v = push(std::move(n));
  bound_.emplace(&p, v.id);
  return v;
}

Var Graph::record(std::string_view op, Tensor value, std::vector<Var> inputs, BackwardFn fn) {
  Node n;
  n.op = std::string(op);
  n.value = std::move(value);
  n.inputs.reserve(inputs.size());
  for (const Var& v : inputs) {
    n.inputs.push_back(v.id);
    if (nodes_[v.id].requires_grad) n.requires_grad = true;
  }
  if (!recording() || !fn) n.requires_grad = false;
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

Tensor Graph::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.grad.size() == 0) return Tensor::zeros_like(n.value);
  return n.grad;
}

Tensor& Graph::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad = Tensor::zeros_like(n.value);
  return n.grad;
}

void Graph::backward(Var loss) {
  if (loss.graph != this) throw std::invalid_argument("backward: loss belongs to another graph");
  const Node& target = nodes_[loss.id];
  if (target.value.size() != 1) {
    throw ShapeError("backward", "loss must be scalar, got " + to_string(target.value.shape()));
  }
  for (auto& n : nodes_) n.grad = Tensor();
  if (!target.requires_grad) return;
  grad_buffer(loss.id)[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(*this, i);
  }
}

std::vector<Tensor> Graph::gradients(std::span<Parameter* const> params) const {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const Parameter* p : params) {
    auto it = bound_.find(p);
    if (it == bound_.end() || nodes_[it->second].grad.size() == 0) {
      out.push_back(Tensor::zeros_like(p->value));
    } else {
      out.push_back(nodes_[it->second].grad);
    }
  }
  return out;
}

}  // namespace dialpol::ad

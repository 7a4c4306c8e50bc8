#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "dialpol/autodiff/graph.hpp"
#include "support/gradcheck.hpp"

namespace dialpol::ad {
namespace {

using testing::grad_check;
using testing::random_tensor;

constexpr int kTrials = 100;
constexpr double kTolerance = 1e-4;

// Projects an op's output onto fixed random weights so every output element
// contributes to the scalar loss.
Var project(Graph& g, Var y, Rng& weights) {
  return sum(mul(y, g.constant(random_tensor(weights, y.shape(), -1.0, 1.0))));
}

struct OpCase {
  std::string name;
  std::vector<Shape> shapes;
  std::function<Var(const std::vector<Var>&)> apply;
  bool positive_inputs = false;
};

std::vector<OpCase> op_cases() {
  const Shape m23{2, 3}, m32{3, 2}, row3{1, 3}, m24{2, 4};
  return {
      {"matmul", {m23, m32}, [](const auto& v) { return matmul(v[0], v[1]); }},
      {"transpose", {m23}, [](const auto& v) { return transpose(v[0]); }},
      {"add", {m23, m23}, [](const auto& v) { return add(v[0], v[1]); }},
      {"add_broadcast", {m23, row3}, [](const auto& v) { return add(v[0], v[1]); }},
      {"sub", {m23, m23}, [](const auto& v) { return sub(v[0], v[1]); }},
      {"mul", {m23, m23}, [](const auto& v) { return mul(v[0], v[1]); }},
      {"mul_broadcast", {m23, row3}, [](const auto& v) { return mul(v[0], v[1]); }},
      {"div", {m23, m23}, [](const auto& v) { return div(v[0], v[1]); }, true},
      {"scale", {m23}, [](const auto& v) { return scale(v[0], -1.7); }},
      {"add_scalar", {m23}, [](const auto& v) { return add_scalar(v[0], 0.3); }},
      {"sigmoid", {m23}, [](const auto& v) { return sigmoid(v[0]); }},
      {"tanh", {m23}, [](const auto& v) { return tanh(v[0]); }},
      {"relu", {m23}, [](const auto& v) { return relu(v[0]); }},
      {"exp", {m23}, [](const auto& v) { return exp(v[0]); }},
      {"log", {m23}, [](const auto& v) { return log(v[0]); }, true},
      {"sqrt", {m23}, [](const auto& v) { return sqrt(v[0]); }, true},
      {"softmax", {m24}, [](const auto& v) { return softmax(v[0]); }},
      {"softmax_pairs", {m24}, [](const auto& v) { return softmax(v[0], 2); }},
      {"log_softmax", {m24}, [](const auto& v) { return log_softmax(v[0]); }},
      {"log_softmax_pairs", {m24}, [](const auto& v) { return log_softmax(v[0], 2); }},
      {"concat", {m23, m24}, [](const auto& v) { return concat({v[0], v[1]}); }},
      {"slice", {m24}, [](const auto& v) { return slice(v[0], 1, 3); }},
      {"gather_rows", {Shape{4, 3}}, [](const auto& v) { return gather_rows(v[0], {3, 0, 3, 1}); }},
      {"sum", {m23}, [](const auto& v) { return sum(v[0]); }},
      {"mean", {m23}, [](const auto& v) { return mean(v[0]); }},
      {"row_sum", {m24}, [](const auto& v) { return row_sum(v[0]); }},
      {"bce_with_logits", {m23},
       [](const auto& v) { return bce_with_logits(v[0], Tensor::matrix({{1, 0, 1}, {0, 0, 1}})); }},
  };
}

// Inputs are uniform on [-2, 2]; ops whose domain is the positive reals
// (log, sqrt, divisor of div) take |x| + 0.5 instead.
TEST(GradientTest, EveryOpMatchesFiniteDifferences) {
  for (const OpCase& op : op_cases()) {
    Rng rng(derive_seed(17, op.name));
    double worst = 0.0;
    for (int trial = 0; trial < kTrials; ++trial) {
      std::vector<Tensor> inputs;
      for (const auto& s : op.shapes) {
        Tensor t = random_tensor(rng, s);
        if (op.positive_inputs) {
          for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::abs(t[i]) + 0.5;
        }
        inputs.push_back(std::move(t));
      }
      const std::uint64_t weight_seed = rng.next_u64();
      auto loss = [&](Graph& g, const std::vector<Var>& v) {
        Rng weights(weight_seed);
        return project(g, op.apply(v), weights);
      };
      worst = std::max(worst, grad_check(loss, inputs).max_rel_error);
    }
    EXPECT_LT(worst, kTolerance) << op.name;
  }
}

TEST(GradientTest, RandomThreeLayerMlp) {
  Rng rng(99);
  for (int trial = 0; trial < kTrials; ++trial) {
    std::vector<Tensor> inputs = {
        random_tensor(rng, {4, 5}),  // batch
        random_tensor(rng, {5, 6}), random_tensor(rng, {1, 6}),
        random_tensor(rng, {6, 4}), random_tensor(rng, {1, 4}),
        random_tensor(rng, {4, 3}), random_tensor(rng, {1, 3}),
    };
    auto loss = [](Graph&, const std::vector<Var>& v) {
      Var h1 = tanh(add(matmul(v[0], v[1]), v[2]));
      Var h2 = sigmoid(add(matmul(h1, v[3]), v[4]));
      Var out = add(matmul(h2, v[5]), v[6]);
      return mean(log_softmax(out));
    };
    EXPECT_LT(grad_check(loss, inputs).max_rel_error, kTolerance) << "trial " << trial;
  }
}

// The straight-through backward equals the gradient of the soft sample, so a
// finite difference taken along the soft path is the oracle.
TEST(GradientTest, StraightThroughPassesSoftPathGradient) {
  Rng rng(5);
  for (int trial = 0; trial < kTrials; ++trial) {
    const Tensor logits = random_tensor(rng, {3, 4});
    const Tensor weights = random_tensor(rng, {3, 4}, -1.0, 1.0);

    Graph g;
    Var z = g.leaf(logits);
    g.backward(sum(mul(straight_through(softmax(z, 2), 2), g.constant(weights))));
    const Tensor st_grad = g.grad(z);

    auto soft = [&](Graph& gr, const std::vector<Var>& v) {
      return sum(mul(softmax(v[0], 2), gr.constant(weights)));
    };
    const double h = 1e-5;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      auto plus = std::vector<Tensor>{logits};
      auto minus = plus;
      plus[0][i] += h;
      minus[0][i] -= h;
      const double fd = (testing::eval_loss(soft, plus) - testing::eval_loss(soft, minus)) / (2 * h);
      EXPECT_LT(testing::rel_error(st_grad[i], fd), kTolerance);
    }
  }
}

}  // namespace
}  // namespace dialpol::ad

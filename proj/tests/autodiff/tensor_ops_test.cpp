#include <gtest/gtest.h>

#include <cmath>

#include "dialpol/autodiff/graph.hpp"

namespace dialpol::ad {
namespace {

TEST(TensorTest, RejectsInconsistentData) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor(Shape{0, 3}), ShapeError);
  EXPECT_EQ(Tensor::matrix({{1, 2, 3}, {4, 5, 6}}).shape(), (Shape{2, 3}));
}

TEST(OpsTest, MatmulIdentity) {
  Graph g;
  Var a = g.constant(Tensor::matrix({{1, 2}, {3, 4}}));
  Var id = g.constant(Tensor::matrix({{1, 0}, {0, 1}}));
  EXPECT_EQ(matmul(a, id).value(), Tensor::matrix({{1, 2}, {3, 4}}));
}

TEST(OpsTest, SoftmaxOfEqualLogitsIsUniform) {
  Graph g;
  Var y = softmax(g.constant(Tensor::vector({0, 0})));
  EXPECT_DOUBLE_EQ(y.value()[0], 0.5);
  EXPECT_DOUBLE_EQ(y.value()[1], 0.5);
}

TEST(OpsTest, SigmoidAtZero) {
  Graph g;
  EXPECT_DOUBLE_EQ(sigmoid(g.constant(Tensor::scalar(0))).value().item(), 0.5);
}

TEST(OpsTest, GroupedSoftmaxNormalisesEachPair) {
  Graph g;
  Var y = softmax(g.constant(Tensor::matrix({{0.3, 0.9, -1.0, 2.0}})), 2);
  EXPECT_NEAR(y.value()[0] + y.value()[1], 1.0, 1e-15);
  EXPECT_NEAR(y.value()[2] + y.value()[3], 1.0, 1e-15);
  EXPECT_NEAR(y.value()[1], 1.0 / (1.0 + std::exp(-0.6)), 1e-15);
}

TEST(OpsTest, ShapeErrorsNameTheOp) {
  Graph g;
  Var a = g.constant(Tensor::matrix({{1, 2, 3}}));
  Var b = g.constant(Tensor::matrix({{1, 2}}));
  try {
    matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("matmul"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("[1x3]"), std::string::npos);
  }
  EXPECT_THROW(add(a, b), ShapeError);
  EXPECT_THROW(slice(a, 2, 5), ShapeError);
  EXPECT_THROW(softmax(a, 2), ShapeError);
}

TEST(OpsTest, BiasBroadcastsAcrossRows) {
  Graph g;
  Var x = g.leaf(Tensor::matrix({{1, 2}, {3, 4}, {5, 6}}));
  Var b = g.leaf(Tensor::matrix({{10, 20}}));
  Var y = add(x, b);
  EXPECT_EQ(y.value(), Tensor::matrix({{11, 22}, {13, 24}, {15, 26}}));
  g.backward(sum(y));
  EXPECT_EQ(g.grad(b), Tensor::matrix({{3, 3}}));
}

TEST(OpsTest, NonFiniteOutputIsAnError) {
  Graph g;
  EXPECT_THROW(log(g.constant(Tensor::scalar(0.0))), NonFiniteError);
  EXPECT_THROW(div(g.constant(Tensor::scalar(1.0)), g.constant(Tensor::scalar(0.0))), NonFiniteError);
}

TEST(OpsTest, StraightThroughForwardIsOneHot) {
  Graph g;
  EXPECT_EQ(straight_through(g.constant(Tensor::vector({0.2, 0.8}))).value(), Tensor::vector({0, 1}));
  EXPECT_EQ(straight_through(g.constant(Tensor::vector({0.5, 0.5}))).value(), Tensor::vector({1, 0}));
  Var pairs = straight_through(g.constant(Tensor::matrix({{0.7, 0.3, 0.1, 0.9}})), 2);
  EXPECT_EQ(pairs.value(), Tensor::matrix({{1, 0, 0, 1}}));
}

TEST(OpsTest, GatherRowsScattersGradient) {
  Graph g;
  Var table = g.leaf(Tensor::matrix({{1, 2}, {3, 4}, {5, 6}}));
  Var rows = gather_rows(table, {2, 0, 2});
  EXPECT_EQ(rows.value(), Tensor::matrix({{5, 6}, {1, 2}, {5, 6}}));
  g.backward(sum(rows));
  EXPECT_EQ(g.grad(table), Tensor::matrix({{1, 1}, {0, 0}, {2, 2}}));
}

TEST(BackwardTest, SumGradientIsOnes) {
  Graph g;
  Var x = g.leaf(Tensor::vector({0.3, -1.0, 2.0}));
  g.backward(sum(x));
  EXPECT_EQ(g.grad(x), Tensor::vector({1, 1, 1}));
}

TEST(BackwardTest, SigmoidSlopeAtOrigin) {
  Graph g;
  Var w = g.leaf(Tensor::matrix({{0.0}}));
  Var x = g.constant(Tensor::matrix({{1.0}}));
  g.backward(sigmoid(matmul(w, x)));
  EXPECT_DOUBLE_EQ(g.grad(w).item(), 0.25);
}

TEST(BackwardTest, NonScalarLossIsRejected) {
  Graph g;
  Var x = g.leaf(Tensor::vector({1, 2}));
  EXPECT_THROW(g.backward(x), ShapeError);
}

TEST(BackwardTest, UnvisitedLeavesHoldZero) {
  Graph g;
  Var used = g.leaf(Tensor::vector({1, 2}));
  Var unused = g.leaf(Tensor::vector({3, 4, 5}));
  g.backward(sum(used));
  EXPECT_EQ(g.grad(unused), Tensor::vector({0, 0, 0}));
}

TEST(BackwardTest, ParametersBindOnceAndAccumulate) {
  Parameter p{"w", Tensor::vector({2.0})};
  Graph g;
  Var a = g.parameter(p);
  Var b = g.parameter(p);
  EXPECT_EQ(a.id, b.id);
  g.backward(sum(mul(a, b)));
  Parameter* list[] = {&p};
  EXPECT_DOUBLE_EQ(g.gradients(list)[0].item(), 4.0);
}

TEST(BackwardTest, InferenceModeRecordsNoGradients) {
  Parameter p{"w", Tensor::vector({2.0})};
  Graph g(Graph::Mode::inference);
  Var y = sum(mul(g.parameter(p), g.parameter(p)));
  EXPECT_DOUBLE_EQ(y.value().item(), 4.0);
  g.backward(y);
  Parameter* list[] = {&p};
  EXPECT_DOUBLE_EQ(g.gradients(list)[0].item(), 0.0);
}

TEST(BackwardTest, RepeatedRunsAreBitIdentical) {
  auto run = [] {
    Graph g;
    Var x = g.leaf(Tensor::matrix({{0.1, -0.7, 1.3}, {2.0, 0.5, -1.1}}));
    Var w = g.leaf(Tensor::matrix({{0.2, 0.4}, {-0.3, 0.9}, {1.1, -0.6}}));
    Var loss = mean(log_softmax(tanh(matmul(x, w))));
    g.backward(loss);
    return std::make_pair(g.grad(x), g.grad(w));
  };
  EXPECT_EQ(run(), run());
}

TEST(BceTest, MatchesClosedForm) {
  Graph g;
  Var z = g.leaf(Tensor::vector({0.0, 3.0}));
  Var loss = bce_with_logits(z, Tensor::vector({1.0, 0.0}));
  const double expected = (std::log(2.0) + std::log1p(std::exp(3.0))) / 2.0;
  EXPECT_NEAR(loss.value().item(), expected, 1e-14);
  g.backward(loss);
  EXPECT_NEAR(g.grad(z)[0], (0.5 - 1.0) / 2.0, 1e-15);
}

}  // namespace
}  // namespace dialpol::ad

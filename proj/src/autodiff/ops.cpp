#include <algorithm>
#include <cmath>
#include <limits>

#include "dialpol/autodiff/graph.hpp"

namespace dialpol::ad {

namespace {

Graph& graph_of(Var a) {
  if (a.graph == nullptr) throw std::invalid_argument("op applied to an unbound Var");
  return *a.graph;
}

void same_graph(const char* op, Var a, Var b) {
  if (a.graph != b.graph) throw std::invalid_argument(std::string(op) + ": operands on different graphs");
}

bool wants(Graph& g, std::size_t id) { return g.requires_grad(id); }

// Equal shapes, or `b` is a single row with as many columns as `a`.
bool broadcasts_row(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return false;
  if (b.rows() == 1 && b.cols() == a.cols() && a.rows() > 1) return true;
  if (a.size() == b.size() && a.rows() == b.rows() && a.cols() == b.cols()) return false;
  throw ShapeError(op, to_string(a.shape()) + " vs " + to_string(b.shape()));
}

template <class Fwd, class DA, class DB>
Var binary(const char* op, Var a, Var b, Fwd fwd, DA da, DB db) {
  same_graph(op, a, b);
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool bc = broadcasts_row(op, av, bv);
  const std::size_t cols = av.cols();
  Tensor out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) {
    out[i] = fwd(av[i], bv[bc ? i % cols : i]);
  }
  const std::size_t ia = a.id, ib = b.id;
  return g.record(op, std::move(out), {a, b}, [ia, ib, bc, cols, da, db](Graph& gr, std::size_t self) {
    const Tensor& x = gr.value(ia);
    const Tensor& y = gr.value(ib);
    const Tensor& go = gr.grad_of(self);
    if (wants(gr, ia)) {
      Tensor& gx = gr.grad_buffer(ia);
      for (std::size_t i = 0; i < x.size(); ++i) gx[i] += go[i] * da(x[i], y[bc ? i % cols : i]);
    }
    if (wants(gr, ib)) {
      Tensor& gy = gr.grad_buffer(ib);
      for (std::size_t i = 0; i < x.size(); ++i) {
        gy[bc ? i % cols : i] += go[i] * db(x[i], y[bc ? i % cols : i]);
      }
    }
  });
}

// Elementwise unary op whose derivative is expressed through input x and
// output y.
template <class Fwd, class Deriv>
Var unary(const char* op, Var a, Fwd fwd, Deriv deriv) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  Tensor out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
  const std::size_t ia = a.id;
  return g.record(op, std::move(out), {a}, [ia, deriv](Graph& gr, std::size_t self) {
    const Tensor& x = gr.value(ia);
    const Tensor& y = gr.value(self);
    const Tensor& go = gr.grad_of(self);
    Tensor& gx = gr.grad_buffer(ia);
    for (std::size_t i = 0; i < x.size(); ++i) gx[i] += go[i] * deriv(x[i], y[i]);
  });
}

std::size_t group_width(const char* op, const Tensor& t, std::size_t group) {
  const std::size_t k = group == 0 ? t.cols() : group;
  if (t.cols() % k != 0) {
    throw ShapeError(op, "group " + std::to_string(k) + " does not divide " + to_string(t.shape()));
  }
  return k;
}

}  // namespace

Var matmul(Var a, Var b) {
  same_graph("matmul", a, b);
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.shape()[1] != bv.shape()[0]) {
    throw ShapeError("matmul", to_string(av.shape()) + " x " + to_string(bv.shape()));
  }
  const std::size_t n = av.shape()[0], k = av.shape()[1], m = bv.shape()[1];
  Tensor out({n, m});
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = &out[i * m];
    for (std::size_t p = 0; p < k; ++p) {
      const double x = av[i * k + p];
      if (x == 0.0) continue;
      const double* brow = &bv[p * m];
      for (std::size_t j = 0; j < m; ++j) orow[j] += x * brow[j];
    }
  }
  const std::size_t ia = a.id, ib = b.id;
  return g.record("matmul", std::move(out), {a, b}, [ia, ib, n, k, m](Graph& gr, std::size_t self) {
    const Tensor& x = gr.value(ia);
    const Tensor& w = gr.value(ib);
    const Tensor& go = gr.grad_of(self);
    if (wants(gr, ia)) {
      Tensor& gx = gr.grad_buffer(ia);
      for (std::size_t i = 0; i < n; ++i) {
        const double* grow = &go[i * m];
        for (std::size_t p = 0; p < k; ++p) {
          const double* wrow = &w[p * m];
          double acc = 0.0;
          for (std::size_t j = 0; j < m; ++j) acc += grow[j] * wrow[j];
          gx[i * k + p] += acc;
        }
      }
    }
    if (wants(gr, ib)) {
      Tensor& gw = gr.grad_buffer(ib);
      for (std::size_t i = 0; i < n; ++i) {
        const double* grow = &go[i * m];
        for (std::size_t p = 0; p < k; ++p) {
          const double xv = x[i * k + p];
          if (xv == 0.0) continue;
          double* wrow = &gw[p * m];
          for (std::size_t j = 0; j < m; ++j) wrow[j] += xv * grow[j];
        }
      }
    }
  });
}

Var transpose(Var a) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  if (av.rank() != 2) throw ShapeError("transpose", to_string(av.shape()));
  const std::size_t r = av.shape()[0], c = av.shape()[1];
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  const std::size_t ia = a.id;
  return g.record("transpose", std::move(out), {a}, [ia, r, c](Graph& gr, std::size_t self) {
    const Tensor& go = gr.grad_of(self);
    Tensor& gx = gr.grad_buffer(ia);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += go[j * r + i];
  });
}

Var add(Var a, Var b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Var sub(Var a, Var b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Var mul(Var a, Var b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Var div(Var a, Var b) {
  return binary(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; }, [](double x, double y) { return -x / (y * y); });
}

Var scale(Var a, double factor) {
  return unary(
      "scale", a, [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

Var add_scalar(Var a, double c) {
  return unary(
      "add_scalar", a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Var sigmoid(Var a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var relu(Var a) {
  return unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var exp(Var a) {
  return unary(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(Var a) {
  return unary(
      "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var sqrt(Var a) {
  return unary(
      "sqrt", a, [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

Var softmax(Var a, std::size_t group) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  const std::size_t k = group_width("softmax", av, group);
  Tensor out(av.shape());
  for (std::size_t s = 0; s < av.size(); s += k) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) mx = std::max(mx, av[s + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += (out[s + j] = std::exp(av[s + j] - mx));
    for (std::size_t j = 0; j < k; ++j) out[s + j] /= z;
  }
  const std::size_t ia = a.id;
  return g.record("softmax", std::move(out), {a}, [ia, k](Graph& gr, std::size_t self) {
    const Tensor& y = gr.value(self);
    const Tensor& go = gr.grad_of(self);
    Tensor& gx = gr.grad_buffer(ia);
    for (std::size_t s = 0; s < y.size(); s += k) {
      double dot = 0.0;
      for (std::size_t j = 0; j < k; ++j) dot += go[s + j] * y[s + j];
      for (std::size_t j = 0; j < k; ++j) gx[s + j] += y[s + j] * (go[s + j] - dot);
    }
  });
}

Var log_softmax(Var a, std::size_t group) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  const std::size_t k = group_width("log_softmax", av, group);
  Tensor out(av.shape());
  for (std::size_t s = 0; s < av.size(); s += k) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) mx = std::max(mx, av[s + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(av[s + j] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t j = 0; j < k; ++j) out[s + j] = av[s + j] - lse;
  }
  const std::size_t ia = a.id;
  return g.record("log_softmax", std::move(out), {a}, [ia, k](Graph& gr, std::size_t self) {
    const Tensor& y = gr.value(self);
    const Tensor& go = gr.grad_of(self);
    Tensor& gx = gr.grad_buffer(ia);
    for (std::size_t s = 0; s < y.size(); s += k) {
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) total += go[s + j];
      for (std::size_t j = 0; j < k; ++j) gx[s + j] += go[s + j] - std::exp(y[s + j]) * total;
    }
  });
}

Var straight_through(Var y, std::size_t group) {
  Graph& g = graph_of(y);
  const Tensor& yv = y.value();
  const std::size_t k = group_width("straight_through", yv, group);
  Tensor out(yv.shape());
  for (std::size_t s = 0; s < yv.size(); s += k) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (yv[s + j] > yv[s + best]) best = j;
    }
    out[s + best] = 1.0;
  }
  const std::size_t iy = y.id;
  return g.record("straight_through", std::move(out), {y}, [iy](Graph& gr, std::size_t self) {
    const Tensor& go = gr.grad_of(self);
    Tensor& gy = gr.grad_buffer(iy);
    for (std::size_t i = 0; i < go.size(); ++i) gy[i] += go[i];
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat", "no inputs");
  Graph& g = graph_of(parts[0]);
  const std::size_t rows = parts[0].value().rows();
  std::size_t cols = 0;
  std::vector<std::size_t> widths;
  for (const Var& p : parts) {
    same_graph("concat", parts[0], p);
    if (p.value().rows() != rows) {
      throw ShapeError("concat", to_string(parts[0].shape()) + " vs " + to_string(p.shape()));
    }
    widths.push_back(p.value().cols());
    cols += widths.back();
  }
  Tensor out(parts[0].value().rank() == 1 ? Shape{cols} : Shape{rows, cols});
  std::size_t offset = 0;
  for (std::size_t q = 0; q < parts.size(); ++q) {
    const Tensor& pv = parts[q].value();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(&pv[r * widths[q]], widths[q], &out[r * cols + offset]);
    offset += widths[q];
  }
  std::vector<std::size_t> ids;
  for (const Var& p : parts) ids.push_back(p.id);
  return g.record("concat", std::move(out), {parts.begin(), parts.end()},
                  [ids, widths, rows, cols](Graph& gr, std::size_t self) {
                    const Tensor& go = gr.grad_of(self);
                    std::size_t off = 0;
                    for (std::size_t q = 0; q < ids.size(); ++q) {
                      if (wants(gr, ids[q])) {
                        Tensor& gp = gr.grad_buffer(ids[q]);
                        for (std::size_t r = 0; r < rows; ++r)
                          for (std::size_t j = 0; j < widths[q]; ++j)
                            gp[r * widths[q] + j] += go[r * cols + off + j];
                      }
                      off += widths[q];
                    }
                  });
}

Var concat(std::initializer_list<Var> parts) {
  return concat(std::span<const Var>(parts.begin(), parts.size()));
}

Var slice(Var a, std::size_t begin, std::size_t end) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  if (begin >= end || end > av.cols()) {
    throw ShapeError("slice", "[" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                                  to_string(av.shape()));
  }
  const std::size_t rows = av.rows(), cols = av.cols(), w = end - begin;
  Tensor out(av.rank() == 1 ? Shape{w} : Shape{rows, w});
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(&av[r * cols + begin], w, &out[r * w]);
  const std::size_t ia = a.id;
  return g.record("slice", std::move(out), {a}, [ia, rows, cols, begin, w](Graph& gr, std::size_t self) {
    const Tensor& go = gr.grad_of(self);
    Tensor& gx = gr.grad_buffer(ia);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < w; ++j) gx[r * cols + begin + j] += go[r * w + j];
  });
}

Var gather_rows(Var table, std::vector<std::size_t> indices) {
  Graph& g = graph_of(table);
  const Tensor& tv = table.value();
  if (tv.rank() != 2) throw ShapeError("gather_rows", to_string(tv.shape()));
  if (indices.empty()) throw ShapeError("gather_rows", "no indices");
  const std::size_t width = tv.cols();
  Tensor out({indices.size(), width});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= tv.rows()) {
      throw ShapeError("gather_rows", "row " + std::to_string(indices[i]) + " of " + to_string(tv.shape()));
    }
    std::copy_n(&tv[indices[i] * width], width, &out[i * width]);
  }
  const std::size_t it = table.id;
  return g.record("gather_rows", std::move(out), {table},
                  [it, width, idx = std::move(indices)](Graph& gr, std::size_t self) {
                    const Tensor& go = gr.grad_of(self);
                    Tensor& gt = gr.grad_buffer(it);
                    for (std::size_t i = 0; i < idx.size(); ++i)
                      for (std::size_t j = 0; j < width; ++j) gt[idx[i] * width + j] += go[i * width + j];
                  });
}

Var sum(Var a) {
  Graph& g = graph_of(a);
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  const std::size_t ia = a.id;
  return g.record("sum", Tensor::scalar(total), {a}, [ia](Graph& gr, std::size_t self) {
    const double go = gr.grad_of(self)[0];
    Tensor& gx = gr.grad_buffer(ia);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += go;
  });
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var row_sum(Var a) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out({rows, 1});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < cols; ++j) out[r] += av[r * cols + j];
  const std::size_t ia = a.id;
  return g.record("row_sum", std::move(out), {a}, [ia, rows, cols](Graph& gr, std::size_t self) {
    const Tensor& go = gr.grad_of(self);
    Tensor& gx = gr.grad_buffer(ia);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < cols; ++j) gx[r * cols + j] += go[r];
  });
}

Var bce_with_logits(Var logits, const Tensor& targets) {
  Graph& g = graph_of(logits);
  const Tensor& z = logits.value();
  if (z.size() != targets.size()) {
    throw ShapeError("bce_with_logits", to_string(z.shape()) + " vs " + to_string(targets.shape()));
  }
  const double n = static_cast<double>(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    total += std::max(z[i], 0.0) - z[i] * targets[i] + std::log1p(std::exp(-std::abs(z[i])));
  }
  const std::size_t iz = logits.id;
  return g.record("bce_with_logits", Tensor::scalar(total / n), {logits},
                  [iz, targets, n](Graph& gr, std::size_t self) {
                    const double go = gr.grad_of(self)[0];
                    const Tensor& zv = gr.value(iz);
                    Tensor& gz = gr.grad_buffer(iz);
                    for (std::size_t i = 0; i < zv.size(); ++i) {
                      const double s = zv[i] >= 0 ? 1.0 / (1.0 + std::exp(-zv[i]))
                                                  : std::exp(zv[i]) / (1.0 + std::exp(zv[i]));
                      gz[i] += go * (s - targets[i]) / n;
                    }
                  });
}

}  // namespace dialpol::ad

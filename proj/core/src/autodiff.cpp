// Copyright 2026 The HPCNeuroNet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hpcnn/autodiff.hpp"

#include <cmath>
#include <utility>

#include "hpcnn/errors.hpp"

namespace hpcnn {

const Tensor& Var::value() const {
  if (!tape) throw UsageError("Var::value on an unbound handle");
  return tape->value(id);
}

void GradTape::check_same_tape(Var v) const {
  if (v.tape != this) {
    throw UsageError("autodiff: variable belongs to a different tape");
  }
}

Var GradTape::leaf(Tensor value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), requires_grad, nullptr});
  const NodeId id = nodes_.size() - 1;
  if (requires_grad) grad_leaves_.push_back(id);
  return Var{this, id};
}

Var GradTape::leaf(Tensor value) {
  const bool rg = value.requires_grad;
  return leaf(std::move(value), rg);
}

Var GradTape::emit(Tensor value, std::initializer_list<Var> parents,
                   BackwardFn fn) {
  bool requires = false;
  for (Var p : parents) {
    check_same_tape(p);
    requires = requires || nodes_[p.id].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), requires, requires ? std::move(fn) : nullptr});
  return Var{this, nodes_.size() - 1};
}

void GradTape::accumulate(NodeId id, const Tensor& g) {
  if (!nodes_[id].requires_grad) return;
  if (!grad_set_[id]) {
    grads_[id] = g;
    grad_set_[id] = 1;
  } else {
    grads_[id] = hpcnn::add(grads_[id], g);
  }
}

Var GradTape::add(Var a, Var b) {
  Tensor out = hpcnn::add(a.value(), b.value());
  const NodeId ia = a.id, ib = b.id;
  return emit(std::move(out), {a, b}, [ia, ib](GradTape& t, const Tensor& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, g);
  });
}

Var GradTape::sub(Var a, Var b) {
  Tensor out = hpcnn::sub(a.value(), b.value());
  const NodeId ia = a.id, ib = b.id;
  return emit(std::move(out), {a, b}, [ia, ib](GradTape& t, const Tensor& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, hpcnn::scale(g, -1.0));
  });
}

Var GradTape::mul(Var a, Var b) {
  Tensor out = hpcnn::mul(a.value(), b.value());
  const NodeId ia = a.id, ib = b.id;
  return emit(std::move(out), {a, b}, [ia, ib](GradTape& t, const Tensor& g) {
    t.accumulate(ia, hpcnn::mul(g, t.value(ib)));
    t.accumulate(ib, hpcnn::mul(g, t.value(ia)));
  });
}

Var GradTape::scale(Var a, double factor) {
  Tensor out = hpcnn::scale(a.value(), factor);
  const NodeId ia = a.id;
  return emit(std::move(out), {a}, [ia, factor](GradTape& t, const Tensor& g) {
    t.accumulate(ia, hpcnn::scale(g, factor));
  });
}

Var GradTape::affine_elem(Var a, double mul, double add) {
  Tensor out = hpcnn::affine_elem(a.value(), mul, add);
  const NodeId ia = a.id;
  return emit(std::move(out), {a}, [ia, mul](GradTape& t, const Tensor& g) {
    t.accumulate(ia, hpcnn::scale(g, mul));
  });
}

Var GradTape::relu(Var a) {
  Tensor out = hpcnn::relu(a.value());
  const NodeId ia = a.id;
  return emit(std::move(out), {a}, [ia](GradTape& t, const Tensor& g) {
    const Tensor& x = t.value(ia);
    Tensor gx = g;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      if (x[i] <= 0.0) gx[i] = 0.0;
    }
    t.accumulate(ia, gx);
  });
}

Var GradTape::matmul(Var a, Var b) {
  Tensor out = hpcnn::matmul(a.value(), b.value());
  const NodeId ia = a.id, ib = b.id;
  return emit(std::move(out), {a, b}, [ia, ib](GradTape& t, const Tensor& g) {
    t.accumulate(ia, hpcnn::matmul_nt(g, t.value(ib)));
    t.accumulate(ib, hpcnn::matmul_tn(t.value(ia), g));
  });
}

Var GradTape::matmul_nt(Var a, Var b) {
  Tensor out = hpcnn::matmul_nt(a.value(), b.value());
  const NodeId ia = a.id, ib = b.id;
  return emit(std::move(out), {a, b}, [ia, ib](GradTape& t, const Tensor& g) {
    t.accumulate(ia, hpcnn::matmul(g, t.value(ib)));
    t.accumulate(ib, hpcnn::matmul_tn(g, t.value(ia)));
  });
}

Var GradTape::conv1d(Var x, Var w, std::size_t stride, std::size_t padding) {
  Tensor out = hpcnn::conv1d(x.value(), w.value(), stride, padding);
  const NodeId ix = x.id, iw = w.id;
  return emit(std::move(out), {x, w},
              [ix, iw, stride, padding](GradTape& t, const Tensor& g) {
                const Tensor& xv = t.value(ix);
                const Tensor& wv = t.value(iw);
                const std::size_t c_in = xv.dim(0), length = xv.dim(1);
                const std::size_t c_out = wv.dim(0), kernel = wv.dim(2);
                const std::size_t l_out = g.dim(1);
                Tensor gx = Tensor::zeros(xv.shape());
                Tensor gw = Tensor::zeros(wv.shape());
                for (std::size_t oc = 0; oc < c_out; ++oc) {
                  for (std::size_t o = 0; o < l_out; ++o) {
                    const double go = g(oc, o);
                    const std::size_t start = o * stride;
                    for (std::size_t ic = 0; ic < c_in; ++ic) {
                      for (std::size_t k = 0; k < kernel; ++k) {
                        const std::size_t p = start + k;
                        if (p < padding || p >= padding + length) continue;
                        gx(ic, p - padding) += go * wv(oc, ic, k);
                        gw(oc, ic, k) += go * xv(ic, p - padding);
                      }
                    }
                  }
                }
                t.accumulate(ix, gx);
                t.accumulate(iw, gw);
              });
}

namespace {

// Iterates the 1-D slices of `shape` along normalized axis `a`, calling
// fn(base_offset, stride) for each slice of length shape[a].
template <typename Fn>
void for_each_slice(const std::vector<std::size_t>& shape, int a, Fn&& fn) {
  std::size_t outer = 1, inner = 1;
  for (int i = 0; i < a; ++i) outer *= shape[i];
  for (std::size_t i = a + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t n = shape[a];
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) fn(o * n * inner + i, inner, n);
  }
}

int normalized_axis(const Tensor& x, int axis) {
  int a = axis;
  if (a < 0) a += static_cast<int>(x.rank());
  if (a < 0 || a >= static_cast<int>(x.rank())) {
    throw ShapeError("softmax: axis out of range");
  }
  return a;
}

}  // namespace

Var GradTape::softmax(Var a, int axis) {
  Tensor out = hpcnn::softmax(a.value(), axis);
  const NodeId ia = a.id;
  const int na = normalized_axis(a.value(), axis);
  const NodeId self = nodes_.size();  // id the new node will get
  return emit(std::move(out), {a}, [ia, na, self](GradTape& t, const Tensor& g) {
    const Tensor& y = t.value(self);
    Tensor gx = Tensor::zeros(y.shape());
    const double* py = y.data();
    const double* pg = g.data();
    double* px = gx.data();
    for_each_slice(y.shape(), na,
                   [&](std::size_t base, std::size_t stride, std::size_t n) {
                     double dot = 0.0;
                     for (std::size_t i = 0; i < n; ++i) {
                       dot += pg[base + i * stride] * py[base + i * stride];
                     }
                     for (std::size_t i = 0; i < n; ++i) {
                       const std::size_t k = base + i * stride;
                       px[k] = py[k] * (pg[k] - dot);
                     }
                   });
    t.accumulate(ia, gx);
  });
}

Var GradTape::log_softmax(Var a, int axis) {
  Tensor out = hpcnn::log_softmax(a.value(), axis);
  const NodeId ia = a.id;
  const int na = normalized_axis(a.value(), axis);
  const NodeId self = nodes_.size();
  return emit(std::move(out), {a}, [ia, na, self](GradTape& t, const Tensor& g) {
    const Tensor& y = t.value(self);  // log probabilities
    Tensor gx = Tensor::zeros(y.shape());
    const double* py = y.data();
    const double* pg = g.data();
    double* px = gx.data();
    for_each_slice(y.shape(), na,
                   [&](std::size_t base, std::size_t stride, std::size_t n) {
                     double total = 0.0;
                     for (std::size_t i = 0; i < n; ++i) total += pg[base + i * stride];
                     for (std::size_t i = 0; i < n; ++i) {
                       const std::size_t k = base + i * stride;
                       px[k] = pg[k] - std::exp(py[k]) * total;
                     }
                   });
    t.accumulate(ia, gx);
  });
}

Var GradTape::layer_norm(Var x, Var gamma, Var beta, double eps) {
  Tensor out = hpcnn::layer_norm(x.value(), gamma.value(), beta.value(), eps);
  const NodeId ix = x.id, ig = gamma.id, ib = beta.id;
  return emit(std::move(out), {x, gamma, beta},
              [ix, ig, ib, eps](GradTape& t, const Tensor& g) {
                const Tensor& xv = t.value(ix);
                const Tensor& gammav = t.value(ig);
                const std::size_t d = xv.shape().back();
                const std::size_t rows = xv.size() / d;
                Tensor gx = Tensor::zeros(xv.shape());
                Tensor ggamma = Tensor::zeros({d});
                Tensor gbeta = Tensor::zeros({d});
                const double* px = xv.data();
                const double* pg = g.data();
                double* pgx = gx.data();
                const double inv_d = 1.0 / static_cast<double>(d);
                for (std::size_t r = 0; r < rows; ++r) {
                  const double* xr = px + r * d;
                  const double* gr = pg + r * d;
                  double mean = 0.0;
                  for (std::size_t j = 0; j < d; ++j) mean += xr[j];
                  mean *= inv_d;
                  double var = 0.0;
                  for (std::size_t j = 0; j < d; ++j) {
                    const double c = xr[j] - mean;
                    var += c * c;
                  }
                  var *= inv_d;
                  const double inv_std = 1.0 / std::sqrt(var + eps);
                  // u = gamma . g ; dx = inv_std (u - mean(u) - xhat mean(u xhat))
                  double mean_u = 0.0, mean_ux = 0.0;
                  for (std::size_t j = 0; j < d; ++j) {
                    const double xhat = (xr[j] - mean) * inv_std;
                    const double u = gammav[j] * gr[j];
                    mean_u += u;
                    mean_ux += u * xhat;
                    ggamma[j] += gr[j] * xhat;
                    gbeta[j] += gr[j];
                  }
                  mean_u *= inv_d;
                  mean_ux *= inv_d;
                  for (std::size_t j = 0; j < d; ++j) {
                    const double xhat = (xr[j] - mean) * inv_std;
                    const double u = gammav[j] * gr[j];
                    pgx[r * d + j] = inv_std * (u - mean_u - xhat * mean_ux);
                  }
                }
                t.accumulate(ix, gx);
                t.accumulate(ig, ggamma);
                t.accumulate(ib, gbeta);
              });
}

Var GradTape::add_rowvec(Var m, Var row) {
  Tensor out = hpcnn::add_rowvec(m.value(), row.value());
  const NodeId im = m.id, ir = row.id;
  return emit(std::move(out), {m, row}, [im, ir](GradTape& t, const Tensor& g) {
    t.accumulate(im, g);
    const std::size_t rows = g.dim(0), cols = g.dim(1);
    Tensor gr = Tensor::zeros({cols});
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) gr[j] += g(i, j);
    }
    t.accumulate(ir, gr);
  });
}

Var GradTape::reshape(Var a, std::vector<std::size_t> shape) {
  Tensor out = hpcnn::reshape(a.value(), shape);
  const NodeId ia = a.id;
  return emit(std::move(out), {a}, [ia](GradTape& t, const Tensor& g) {
    t.accumulate(ia, hpcnn::reshape(g, t.value(ia).shape()));
  });
}

Var GradTape::slice_cols(Var a, std::size_t col_begin, std::size_t col_end) {
  Tensor out = hpcnn::slice_cols(a.value(), col_begin, col_end);
  const NodeId ia = a.id;
  return emit(std::move(out), {a},
              [ia, col_begin](GradTape& t, const Tensor& g) {
                const Tensor& av = t.value(ia);
                Tensor gx = Tensor::zeros(av.shape());
                const std::size_t rows = g.dim(0), cols = g.dim(1);
                for (std::size_t i = 0; i < rows; ++i) {
                  for (std::size_t j = 0; j < cols; ++j) {
                    gx(i, col_begin + j) = g(i, j);
                  }
                }
                t.accumulate(ia, gx);
              });
}

Var GradTape::concat_cols(std::span<const Var> parts) {
  std::vector<Tensor> values;
  values.reserve(parts.size());
  bool requires = false;
  std::vector<NodeId> ids;
  for (Var p : parts) {
    check_same_tape(p);
    values.push_back(p.value());
    ids.push_back(p.id);
    requires = requires || nodes_[p.id].requires_grad;
  }
  Tensor out = hpcnn::concat_cols(values);
  BackwardFn fn;
  if (requires) {
    fn = [ids](GradTape& t, const Tensor& g) {
      std::size_t offset = 0;
      for (NodeId id : ids) {
        const std::size_t cols = t.value(id).dim(1);
        t.accumulate(id, hpcnn::slice_cols(g, offset, offset + cols));
        offset += cols;
      }
    };
  }
  nodes_.push_back(Node{std::move(out), requires, std::move(fn)});
  return Var{this, nodes_.size() - 1};
}

Var GradTape::scale_rows(Var m, std::vector<double> factors) {
  Tensor out = hpcnn::scale_rows(m.value(), factors);
  const NodeId im = m.id;
  return emit(std::move(out), {m},
              [im, factors = std::move(factors)](GradTape& t, const Tensor& g) {
                t.accumulate(im, hpcnn::scale_rows(g, factors));
              });
}

Var GradTape::sum(Var a) {
  Tensor out = Tensor::scalar(hpcnn::sum(a.value()));
  const NodeId ia = a.id;
  return emit(std::move(out), {a}, [ia](GradTape& t, const Tensor& g) {
    t.accumulate(ia, Tensor::full(t.value(ia).shape(), g[0]));
  });
}

Var GradTape::pick(Var a, std::size_t index) {
  const Tensor& av = a.value();
  if (index >= av.size()) {
    throw UsageError("pick: index " + std::to_string(index) +
                     " out of range for " + av.shape_string());
  }
  Tensor out = Tensor::scalar(av[index]);
  const NodeId ia = a.id;
  return emit(std::move(out), {a}, [ia, index](GradTape& t, const Tensor& g) {
    Tensor gx = Tensor::zeros(t.value(ia).shape());
    gx[index] = g[0];
    t.accumulate(ia, gx);
  });
}

Var GradTape::unary_custom(Var x, std::string name, UnaryForward forward,
                           UnaryBackward backward) {
  (void)name;
  Tensor out = forward(x.value());
  const NodeId ix = x.id;
  return emit(std::move(out), {x},
              [ix, backward = std::move(backward)](GradTape& t, const Tensor& g) {
                t.accumulate(ix, backward(t.value(ix), g));
              });
}

void GradTape::backward(Var loss) {
  check_same_tape(loss);
  if (loss.value().size() != 1) {
    throw UsageError("backward: loss must be scalar, got shape " +
                     loss.value().shape_string());
  }
  grads_.assign(nodes_.size(), Tensor());
  grad_set_.assign(nodes_.size(), 0);
  if (!nodes_[loss.id].requires_grad) {
    return;  // nothing upstream is trainable
  }
  grads_[loss.id] = Tensor::scalar(1.0);
  grad_set_[loss.id] = 1;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    if (!grad_set_[i]) continue;
    const Node& node = nodes_[i];
    if (node.backward) node.backward(*this, grads_[i]);
  }
}

bool GradTape::has_grad(NodeId id) const {
  return id < grad_set_.size() && grad_set_[id];
}

const Tensor& GradTape::grad(NodeId id) const {
  if (!has_grad(id)) {
    throw UsageError("grad: no gradient recorded for node " + std::to_string(id));
  }
  return grads_[id];
}

std::unordered_map<GradTape::NodeId, Tensor> GradTape::leaf_gradients() const {
  std::unordered_map<NodeId, Tensor> out;
  for (NodeId id : grad_leaves_) {
    if (has_grad(id)) {
      out.emplace(id, grads_[id]);
    } else {
      out.emplace(id, Tensor::zeros(nodes_[id].value.shape()));
    }
  }
  return out;
}

}  // namespace hpcnn

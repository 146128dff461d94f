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

#include "hpcnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hpcnn/errors.hpp"

namespace hpcnn {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

void require_rank2(const Tensor& t, const char* what) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(what) + " expects a rank-2 tensor, got shape " +
                     t.shape_string());
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (std::size_t d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive");
  }
  if (data_.size() != shape_product(shape_)) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string());
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  std::size_t n = shape_product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  std::size_t n = shape_product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::from_vector(std::vector<double> values) {
  std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::from_matrix(std::size_t rows, std::size_t cols,
                           std::vector<double> data) {
  return Tensor({rows, cols}, std::move(data));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " +
                     shape_string());
  }
  return shape_[axis];
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << 'x';
    os << shape_[i];
  }
  os << ']';
  return os.str();
}

bool exactly_equal(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) return false;
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (pa[i] != pb[i]) return false;
  }
  return true;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("max_abs_diff: shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

std::ostream& operator<<(std::ostream& os, const Tensor& t) {
  os << "Tensor" << t.shape_string() << "{";
  const std::size_t shown = std::min<std::size_t>(t.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) os << ", ";
    os << t[i];
  }
  if (t.size() > shown) os << ", ...";
  return os << "}";
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner dimensions disagree, " + a.shape_string() +
                     " x " + b.shape_string());
  }
  const std::size_t n = b.dim(1);
  Tensor c = Tensor::zeros({m, n});
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = pa + i * k;
    double* crow = pc + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double av = arow[l];
      const double* brow = pb + l * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_nt");
  require_rank2(b, "matmul_nt");
  const std::size_t m = a.dim(0), k = a.dim(1);
  if (b.dim(1) != k) {
    throw ShapeError("matmul_nt: inner dimensions disagree, " + a.shape_string() +
                     " x " + b.shape_string() + "^T");
  }
  const std::size_t n = b.dim(0);
  Tensor c = Tensor::zeros({m, n});
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = pa + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = pb + j * k;
      double acc = 0.0;
      for (std::size_t l = 0; l < k; ++l) acc += arow[l] * brow[l];
      pc[i * n + j] = acc;
    }
  }
  return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_tn");
  require_rank2(b, "matmul_tn");
  const std::size_t k = a.dim(0), m = a.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul_tn: inner dimensions disagree, " + a.shape_string() +
                     "^T x " + b.shape_string());
  }
  const std::size_t n = b.dim(1);
  Tensor c = Tensor::zeros({m, n});
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t l = 0; l < k; ++l) {
    const double* arow = pa + l * m;
    const double* brow = pb + l * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = arow[i];
      double* crow = pc + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel,
                                 std::size_t stride, std::size_t padding) {
  const std::size_t padded = length + 2 * padding;
  if (kernel == 0 || kernel > padded) {
    throw ShapeError("conv1d: kernel " + std::to_string(kernel) +
                     " larger than padded input " + std::to_string(padded));
  }
  if (stride == 0) throw ShapeError("conv1d: stride must be positive");
  return (padded - kernel) / stride + 1;
}

Tensor conv1d(const Tensor& x, const Tensor& w, std::size_t stride,
              std::size_t padding) {
  require_rank2(x, "conv1d input");
  if (w.rank() != 3) {
    throw ShapeError("conv1d kernel expects shape [C_out,C_in,K], got " +
                     w.shape_string());
  }
  const std::size_t c_in = x.dim(0), length = x.dim(1);
  const std::size_t c_out = w.dim(0), kernel = w.dim(2);
  if (w.dim(1) != c_in) {
    throw ShapeError("conv1d: input channels " + std::to_string(c_in) +
                     " do not match kernel channels " + std::to_string(w.dim(1)));
  }
  const std::size_t l_out = conv1d_output_length(length, kernel, stride, padding);
  Tensor y = Tensor::zeros({c_out, l_out});
  for (std::size_t oc = 0; oc < c_out; ++oc) {
    for (std::size_t o = 0; o < l_out; ++o) {
      double acc = 0.0;
      const std::size_t start = o * stride;  // position in padded input
      for (std::size_t ic = 0; ic < c_in; ++ic) {
        for (std::size_t t = 0; t < kernel; ++t) {
          const std::size_t p = start + t;
          if (p < padding || p >= padding + length) continue;
          acc += x(ic, p - padding) * w(oc, ic, t);
        }
      }
      y(oc, o) = acc;
    }
  }
  return y;
}

namespace {

int normalize_axis(const Tensor& x, int axis, const char* what) {
  const int r = static_cast<int>(x.rank());
  int a = axis;
  if (a < 0) a += r;
  if (a < 0 || a >= r) {
    throw ShapeError(std::string(what) + ": axis " + std::to_string(axis) +
                     " out of range for shape " + x.shape_string());
  }
  return a;
}

// Applies fn to every 1-D slice along `axis`. fn(src, dst, n, stride).
template <typename Fn>
Tensor map_slices(const Tensor& x, int axis, Fn&& fn) {
  const auto& shape = x.shape();
  std::size_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t n = shape[axis];
  Tensor y = Tensor::zeros(shape);
  const double* src = x.data();
  double* dst = y.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * n * inner + i;
      fn(src + base, dst + base, n, inner);
    }
  }
  return y;
}

}  // namespace

Tensor softmax(const Tensor& x, int axis) {
  const int a = normalize_axis(x, axis, "softmax");
  return map_slices(x, a,
                    [](const double* src, double* dst, std::size_t n,
                       std::size_t stride) {
                      double peak = src[0];
                      for (std::size_t i = 1; i < n; ++i)
                        peak = std::max(peak, src[i * stride]);
                      double total = 0.0;
                      for (std::size_t i = 0; i < n; ++i) {
                        const double e = std::exp(src[i * stride] - peak);
                        dst[i * stride] = e;
                        total += e;
                      }
                      const double inv = 1.0 / total;
                      for (std::size_t i = 0; i < n; ++i) dst[i * stride] *= inv;
                    });
}

Tensor log_softmax(const Tensor& x, int axis) {
  const int a = normalize_axis(x, axis, "log_softmax");
  return map_slices(x, a,
                    [](const double* src, double* dst, std::size_t n,
                       std::size_t stride) {
                      double peak = src[0];
                      for (std::size_t i = 1; i < n; ++i)
                        peak = std::max(peak, src[i * stride]);
                      double total = 0.0;
                      for (std::size_t i = 0; i < n; ++i)
                        total += std::exp(src[i * stride] - peak);
                      const double log_total = std::log(total);
                      for (std::size_t i = 0; i < n; ++i)
                        dst[i * stride] = src[i * stride] - peak - log_total;
                    });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps) {
  if (x.rank() == 0) throw ShapeError("layer_norm: empty tensor");
  if (eps <= 0.0) throw UsageError("layer_norm: eps must be positive");
  const std::size_t d = x.shape().back();
  if (gamma.rank() != 1 || gamma.dim(0) != d || beta.rank() != 1 ||
      beta.dim(0) != d) {
    throw ShapeError("layer_norm: gamma/beta must have shape [" +
                     std::to_string(d) + "]");
  }
  const std::size_t rows = x.size() / d;
  Tensor y = Tensor::zeros(x.shape());
  const double* src = x.data();
  double* dst = y.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = src + r * d;
    double* yr = dst + r * d;
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += xr[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = xr[j] - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double inv_std = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      yr[j] = gamma[j] * ((xr[j] - mean) * inv_std) + beta[j];
    }
  }
  return y;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_string() +
                     " vs " + b.shape_string());
  }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor c = a;
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < c.size(); ++i) pc[i] += pb[i];
  return c;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor c = a;
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < c.size(); ++i) pc[i] -= pb[i];
  return c;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor c = a;
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < c.size(); ++i) pc[i] *= pb[i];
  return c;
}

Tensor scale(const Tensor& a, double factor) {
  Tensor c = a;
  for (double& v : c.values()) v *= factor;
  return c;
}

Tensor affine_elem(const Tensor& a, double mul, double add) {
  Tensor c = a;
  for (double& v : c.values()) v = mul * v + add;
  return c;
}

Tensor add_rowvec(const Tensor& m, const Tensor& row) {
  require_rank2(m, "add_rowvec");
  if (row.rank() != 1 || row.dim(0) != m.dim(1)) {
    throw ShapeError("add_rowvec: row shape " + row.shape_string() +
                     " does not match matrix " + m.shape_string());
  }
  Tensor c = m;
  const std::size_t rows = m.dim(0), cols = m.dim(1);
  double* pc = c.data();
  const double* pr = row.data();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) pc[i * cols + j] += pr[j];
  }
  return c;
}

Tensor transpose(const Tensor& a) {
  require_rank2(a, "transpose");
  const std::size_t m = a.dim(0), n = a.dim(1);
  Tensor t = Tensor::zeros({n, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t(j, i) = a(i, j);
  }
  return t;
}

Tensor reshape(const Tensor& a, std::vector<std::size_t> shape) {
  std::size_t n = shape_product(shape);
  if (n != a.size()) {
    throw ShapeError("reshape: cannot view " + a.shape_string() + " as " +
                     Tensor::zeros(shape).shape_string());
  }
  return Tensor(std::move(shape), std::vector<double>(a.data(), a.data() + n));
}

Tensor slice_cols(const Tensor& a, std::size_t col_begin, std::size_t col_end) {
  require_rank2(a, "slice_cols");
  if (col_begin >= col_end || col_end > a.dim(1)) {
    throw ShapeError("slice_cols: invalid range [" + std::to_string(col_begin) +
                     ", " + std::to_string(col_end) + ") for " + a.shape_string());
  }
  const std::size_t rows = a.dim(0), cols = col_end - col_begin;
  Tensor out = Tensor::zeros({rows, cols});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = a(i, col_begin + j);
  }
  return out;
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no tensors given");
  const std::size_t rows = parts[0].dim(0);
  std::size_t cols = 0;
  for (const Tensor& p : parts) {
    if (p.rank() != 2 || p.dim(0) != rows) {
      throw ShapeError("concat_cols: row counts disagree");
    }
    cols += p.dim(1);
  }
  Tensor out = Tensor::zeros({rows, cols});
  std::size_t offset = 0;
  for (const Tensor& p : parts) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < p.dim(1); ++j) out(i, offset + j) = p(i, j);
    }
    offset += p.dim(1);
  }
  return out;
}

Tensor scale_rows(const Tensor& m, std::span<const double> factors) {
  require_rank2(m, "scale_rows");
  if (factors.size() != m.dim(0)) {
    throw ShapeError("scale_rows: factor count " + std::to_string(factors.size()) +
                     " does not match rows of " + m.shape_string());
  }
  Tensor c = m;
  const std::size_t rows = m.dim(0), cols = m.dim(1);
  double* pc = c.data();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) pc[i * cols + j] *= factors[i];
  }
  return c;
}

Tensor slice_axis0(const Tensor& a, std::size_t index) {
  if (a.rank() < 2) throw ShapeError("slice_axis0 expects rank >= 2");
  if (index >= a.dim(0)) {
    throw ShapeError("slice_axis0: index " + std::to_string(index) +
                     " out of range for " + a.shape_string());
  }
  std::vector<std::size_t> shape(a.shape().begin() + 1, a.shape().end());
  const std::size_t n = a.size() / a.dim(0);
  std::vector<double> data(a.data() + index * n, a.data() + (index + 1) * n);
  return Tensor(std::move(shape), std::move(data));
}

Tensor stack_axis0(std::span<const Tensor> slices) {
  if (slices.empty()) throw ShapeError("stack_axis0: no tensors given");
  const Tensor& first = slices[0];
  std::vector<std::size_t> shape;
  shape.push_back(slices.size());
  shape.insert(shape.end(), first.shape().begin(), first.shape().end());
  std::vector<double> data;
  data.reserve(first.size() * slices.size());
  for (const Tensor& s : slices) {
    if (!s.same_shape(first)) throw ShapeError("stack_axis0: shapes disagree");
    data.insert(data.end(), s.data(), s.data() + s.size());
  }
  return Tensor(std::move(shape), std::move(data));
}

Tensor mean_axis0(const Tensor& a) {
  if (a.rank() < 2) throw ShapeError("mean_axis0 expects rank >= 2");
  const std::size_t t = a.dim(0);
  const std::size_t n = a.size() / t;
  std::vector<std::size_t> shape(a.shape().begin() + 1, a.shape().end());
  Tensor out = Tensor::zeros(shape);
  double* po = out.data();
  const double* pa = a.data();
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < n; ++j) po[j] += pa[i * n + j];
  }
  const double inv = 1.0 / static_cast<double>(t);
  for (std::size_t j = 0; j < n; ++j) po[j] *= inv;
  return out;
}

double sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  return acc;
}

}  // namespace hpcnn

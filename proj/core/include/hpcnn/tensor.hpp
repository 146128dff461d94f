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

#ifndef HPCNN_TENSOR_HPP_
#define HPCNN_TENSOR_HPP_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hpcnn {

// Dense row-major tensor of doubles. Values are immutable by convention once
// an operation has produced them; mutation is reserved for parameter updates.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double value);
  static Tensor scalar(double value);  // shape {1}
  static Tensor from_vector(std::vector<double> values);  // shape {n}
  static Tensor from_matrix(std::size_t rows, std::size_t cols,
                            std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const;
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  // Unchecked 2-D / 3-D element access.
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * shape_[1] + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * shape_[1] + j];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  std::string shape_string() const;

  // Marks a parameter tensor for gradient tracking when registered on a tape.
  bool requires_grad = false;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

bool exactly_equal(const Tensor& a, const Tensor& b);
double max_abs_diff(const Tensor& a, const Tensor& b);
std::ostream& operator<<(std::ostream& os, const Tensor& t);

// --- Kernels -------------------------------------------------------------
// Every kernel validates shapes and throws ShapeError on mismatch. The same
// kernels back both the inference path and the autodiff forward pass, so the
// two paths produce bit-identical values.

Tensor matmul(const Tensor& a, const Tensor& b);     // [m,k]x[k,n] -> [m,n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a . b^T
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a^T . b

// Cross-correlation of x[C_in,L] with w[C_out,C_in,K] -> [C_out,L_out],
// L_out = floor((L + 2*padding - K) / stride) + 1.
Tensor conv1d(const Tensor& x, const Tensor& w, std::size_t stride,
              std::size_t padding);
std::size_t conv1d_output_length(std::size_t length, std::size_t kernel,
                                 std::size_t stride, std::size_t padding);

// Numerically stable softmax along `axis` (negative axes count from the end).
Tensor softmax(const Tensor& x, int axis);
Tensor log_softmax(const Tensor& x, int axis);

// Normalization over the last axis followed by the affine (gamma, beta).
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps);

Tensor relu(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor affine_elem(const Tensor& a, double mul, double add);  // mul*x + add
Tensor add_rowvec(const Tensor& m, const Tensor& row);
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, std::vector<std::size_t> shape);
Tensor slice_cols(const Tensor& a, std::size_t col_begin, std::size_t col_end);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor scale_rows(const Tensor& m, std::span<const double> factors);
Tensor slice_axis0(const Tensor& a, std::size_t index);
Tensor stack_axis0(std::span<const Tensor> slices);
Tensor mean_axis0(const Tensor& a);
double sum(const Tensor& a);

}  // namespace hpcnn

#endif  // HPCNN_TENSOR_HPP_

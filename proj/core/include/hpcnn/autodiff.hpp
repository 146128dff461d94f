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

#ifndef HPCNN_AUTODIFF_HPP_
#define HPCNN_AUTODIFF_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hpcnn/tensor.hpp"

namespace hpcnn {

class GradTape;

// Handle to a node on a tape. Cheap to copy; valid as long as the tape lives.
struct Var {
  GradTape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  bool valid() const { return tape != nullptr; }
};

// Reverse-mode tape. Nodes are appended in evaluation order, so parents
// always precede children and a single backward sweep in reverse id order
// is a valid topological traversal. One tape instance is single-threaded.
class GradTape {
 public:
  using NodeId = std::size_t;
  using UnaryForward = std::function<Tensor(const Tensor&)>;
  // Receives the saved input value and the output gradient, returns the
  // input gradient.
  using UnaryBackward = std::function<Tensor(const Tensor&, const Tensor&)>;

  GradTape() = default;
  GradTape(const GradTape&) = delete;
  GradTape& operator=(const GradTape&) = delete;

  std::size_t size() const { return nodes_.size(); }
  const Tensor& value(NodeId id) const { return nodes_[id].value; }

  Var leaf(Tensor value, bool requires_grad);
  Var leaf(Tensor value);  // requires_grad taken from the tensor flag
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double factor);
  Var affine_elem(Var a, double mul, double add);
  Var relu(Var a);
  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);
  Var conv1d(Var x, Var w, std::size_t stride, std::size_t padding);
  Var softmax(Var a, int axis);
  Var log_softmax(Var a, int axis);
  Var layer_norm(Var x, Var gamma, Var beta, double eps);
  Var add_rowvec(Var m, Var row);
  Var reshape(Var a, std::vector<std::size_t> shape);
  Var slice_cols(Var a, std::size_t col_begin, std::size_t col_end);
  Var concat_cols(std::span<const Var> parts);
  Var scale_rows(Var m, std::vector<double> factors);
  Var sum(Var a);                      // -> shape {1}
  Var pick(Var a, std::size_t index);  // -> shape {1}

  // Custom differentiable unary operation (used for spike nonlinearities).
  Var unary_custom(Var x, std::string name, UnaryForward forward,
                   UnaryBackward backward);

  // Seeds d(loss)/d(loss) = 1 and propagates to every requires_grad node.
  // `loss` must be scalar (shape {1}).
  void backward(Var loss);

  bool has_grad(NodeId id) const;
  const Tensor& grad(NodeId id) const;
  // Gradients of all requires_grad leaves, keyed by node id. Leaves that
  // did not participate in the loss map to zero tensors.
  std::unordered_map<NodeId, Tensor> leaf_gradients() const;

 private:
  using BackwardFn = std::function<void(GradTape&, const Tensor&)>;

  struct Node {
    Tensor value;
    bool requires_grad = false;
    BackwardFn backward;  // empty for leaves and constants
  };

  Var emit(Tensor value, std::initializer_list<Var> parents, BackwardFn fn);
  void accumulate(NodeId id, const Tensor& g);
  void check_same_tape(Var v) const;

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::vector<char> grad_set_;
  std::vector<NodeId> grad_leaves_;
};

}  // namespace hpcnn

#endif  // HPCNN_AUTODIFF_HPP_

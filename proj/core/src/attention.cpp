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

#include "hpcnn/attention.hpp"

#include <cmath>
#include <vector>

#include "hpcnn/errors.hpp"

namespace hpcnn {

void EmbeddingParams::validate() const {
  if (lift_weight.rank() != 2 || !lift_weight.same_shape(lift_bias)) {
    throw ConfigError("embedding: lift weight and bias must both be [N x d]");
  }
  if (d_model() < 2 || d_model() % 2 != 0) {
    throw ConfigError("embedding: d_model must be even and >= 2");
  }
}

void MHAParams::validate() const {
  const std::size_t d = w_query.dim(0);
  for (const Tensor* w : {&w_query, &w_key, &w_value, &w_out}) {
    if (w->rank() != 2 || w->dim(0) != d || w->dim(1) != d) {
      throw ConfigError("multi-head attention: projections must be square [d x d]");
    }
  }
  if (n_heads == 0 || d % n_heads != 0) {
    throw ConfigError("multi-head attention: d_model " + std::to_string(d) +
                      " not divisible by n_heads " + std::to_string(n_heads));
  }
}

void EncoderLayerParams::validate() const {
  mha.validate();
  const std::size_t d = mha.d_model();
  if (ffn.w1.dim(0) != d || ffn.w2.dim(1) != d ||
      ffn.w1.dim(1) != ffn.w2.dim(0)) {
    throw ConfigError("encoder layer: feed-forward shapes inconsistent");
  }
  if (ffn.w1.dim(1) < d) {
    throw ConfigError("encoder layer: d_ff must be >= d_model");
  }
}

Tensor embed_features(std::span<const double> x, const EmbeddingParams& p) {
  p.validate();
  if (x.size() != p.n_features()) {
    throw ShapeError("embed_features: got " + std::to_string(x.size()) +
                     " features, expected " + std::to_string(p.n_features()));
  }
  return add(scale_rows(p.lift_weight, x), p.lift_bias);
}

Tensor positional_encoding(std::size_t n_tokens, std::size_t d_model) {
  if (d_model % 2 != 0) {
    throw ConfigError("positional_encoding: d_model must be even");
  }
  Tensor pe = Tensor::zeros({n_tokens, d_model});
  for (std::size_t pos = 0; pos < n_tokens; ++pos) {
    for (std::size_t i = 0; i < d_model / 2; ++i) {
      const double rate =
          std::pow(10000.0, -(2.0 * static_cast<double>(i)) /
                                 static_cast<double>(d_model));
      const double angle = static_cast<double>(pos) * rate;
      pe(pos, 2 * i) = std::sin(angle);
      pe(pos, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

namespace {

void check_attention_shapes(const Tensor& q, const Tensor& k, const Tensor& v) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2 || !q.same_shape(k) ||
      !q.same_shape(v)) {
    throw ShapeError("attention: Q, K, V must share shape [n x d_h], got " +
                     q.shape_string() + ", " + k.shape_string() + ", " +
                     v.shape_string());
  }
}

}  // namespace

Tensor attention_weights(const Tensor& q, const Tensor& k) {
  check_attention_shapes(q, k, q);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(q.dim(1)));
  return softmax(scale(matmul_nt(q, k), inv_sqrt), 1);
}

Tensor scaled_dot_product_attention(const Tensor& q, const Tensor& k,
                                    const Tensor& v) {
  check_attention_shapes(q, k, v);
  return matmul(attention_weights(q, k), v);
}

Tensor multi_head_attention(const Tensor& x, const MHAParams& p) {
  p.validate();
  if (x.rank() != 2 || x.dim(1) != p.d_model()) {
    throw ShapeError("multi_head_attention: input " + x.shape_string() +
                     " does not match d_model " + std::to_string(p.d_model()));
  }
  const Tensor q = matmul(x, p.w_query);
  const Tensor k = matmul(x, p.w_key);
  const Tensor v = matmul(x, p.w_value);
  const std::size_t d_h = p.head_dim();
  std::vector<Tensor> heads;
  heads.reserve(p.n_heads);
  for (std::size_t h = 0; h < p.n_heads; ++h) {
    const std::size_t c0 = h * d_h, c1 = c0 + d_h;
    heads.push_back(scaled_dot_product_attention(slice_cols(q, c0, c1),
                                                 slice_cols(k, c0, c1),
                                                 slice_cols(v, c0, c1)));
  }
  return matmul(concat_cols(heads), p.w_out);
}

Tensor transformer_encoder_layer(const Tensor& x, const EncoderLayerParams& p) {
  p.validate();
  const Tensor y =
      layer_norm(add(x, multi_head_attention(x, p.mha)), p.norm1.gamma,
                 p.norm1.beta, p.norm1.eps);
  const Tensor hidden = relu(add_rowvec(matmul(y, p.ffn.w1), p.ffn.b1));
  const Tensor ffn_out = add_rowvec(matmul(hidden, p.ffn.w2), p.ffn.b2);
  return layer_norm(add(y, ffn_out), p.norm2.gamma, p.norm2.beta, p.norm2.eps);
}

// --- Tape builders --------------------------------------------------------

Var embed_features(GradTape& tape, std::span<const double> x,
                   const EmbeddingVars& p) {
  if (x.size() != p.lift_weight.value().dim(0)) {
    throw ShapeError("embed_features: feature count mismatch");
  }
  std::vector<double> factors(x.begin(), x.end());
  return tape.add(tape.scale_rows(p.lift_weight, std::move(factors)),
                  p.lift_bias);
}

Var scaled_dot_product_attention(GradTape& tape, Var q, Var k, Var v) {
  check_attention_shapes(q.value(), k.value(), v.value());
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(q.value().dim(1)));
  Var weights = tape.softmax(tape.scale(tape.matmul_nt(q, k), inv_sqrt), 1);
  return tape.matmul(weights, v);
}

Var multi_head_attention(GradTape& tape, Var x, const MHAVars& p) {
  const std::size_t d = x.value().dim(1);
  if (p.n_heads == 0 || d % p.n_heads != 0) {
    throw ConfigError("multi_head_attention: d_model not divisible by n_heads");
  }
  Var q = tape.matmul(x, p.w_query);
  Var k = tape.matmul(x, p.w_key);
  Var v = tape.matmul(x, p.w_value);
  const std::size_t d_h = d / p.n_heads;
  std::vector<Var> heads;
  heads.reserve(p.n_heads);
  for (std::size_t h = 0; h < p.n_heads; ++h) {
    const std::size_t c0 = h * d_h, c1 = c0 + d_h;
    heads.push_back(scaled_dot_product_attention(
        tape, tape.slice_cols(q, c0, c1), tape.slice_cols(k, c0, c1),
        tape.slice_cols(v, c0, c1)));
  }
  return tape.matmul(tape.concat_cols(heads), p.w_out);
}

Var transformer_encoder_layer(GradTape& tape, Var x,
                              const EncoderLayerVars& p) {
  Var y = tape.layer_norm(tape.add(x, multi_head_attention(tape, x, p.mha)),
                          p.gamma1, p.beta1, p.eps);
  Var hidden = tape.relu(tape.add_rowvec(tape.matmul(y, p.w1), p.b1));
  Var ffn_out = tape.add_rowvec(tape.matmul(hidden, p.w2), p.b2);
  return tape.layer_norm(tape.add(y, ffn_out), p.gamma2, p.beta2, p.eps);
}

}  // namespace hpcnn

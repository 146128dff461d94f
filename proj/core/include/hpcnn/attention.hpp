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

#ifndef HPCNN_ATTENTION_HPP_
#define HPCNN_ATTENTION_HPP_

#include <cstddef>
#include <span>

#include "hpcnn/autodiff.hpp"
#include "hpcnn/tensor.hpp"

namespace hpcnn {

// Per-feature affine lift: scalar feature i becomes token row
// x_i * lift_weight[i] + lift_bias[i]. Sequence length equals feature count.
struct EmbeddingParams {
  Tensor lift_weight;  // [n_features x d_model]
  Tensor lift_bias;    // [n_features x d_model]
  std::size_t n_features() const { return lift_weight.dim(0); }
  std::size_t d_model() const { return lift_weight.dim(1); }
  void validate() const;
};

struct MHAParams {
  Tensor w_query, w_key, w_value, w_out;  // each [d x d]
  std::size_t n_heads = 1;
  std::size_t d_model() const { return w_query.dim(0); }
  std::size_t head_dim() const { return d_model() / n_heads; }
  void validate() const;
};

struct FeedForwardParams {
  Tensor w1;  // [d x d_ff]
  Tensor b1;  // [d_ff]
  Tensor w2;  // [d_ff x d]
  Tensor b2;  // [d]
};

struct LayerNormParams {
  Tensor gamma, beta;  // [d]
  double eps = 1e-5;
};

struct EncoderLayerParams {
  MHAParams mha;
  FeedForwardParams ffn;
  LayerNormParams norm1, norm2;
  void validate() const;
};

Tensor embed_features(std::span<const double> x, const EmbeddingParams& p);

// PE[pos][2i]   = sin(pos / 10000^(2i/d))
// PE[pos][2i+1] = cos(pos / 10000^(2i/d)); d must be even.
Tensor positional_encoding(std::size_t n_tokens, std::size_t d_model);

// softmax(Q K^T / sqrt(d_h)) V over row-major token matrices.
Tensor scaled_dot_product_attention(const Tensor& q, const Tensor& k,
                                    const Tensor& v);
// The row-stochastic weight matrix softmax(Q K^T / sqrt(d_h)).
Tensor attention_weights(const Tensor& q, const Tensor& k);

Tensor multi_head_attention(const Tensor& x, const MHAParams& p);

// Post-norm encoder: Z = LN2(Y + FFN(Y)), Y = LN1(X + MHA(X)), ReLU FFN.
Tensor transformer_encoder_layer(const Tensor& x, const EncoderLayerParams& p);

// --- Tape builders. Parameter leaves are supplied by the caller so one
// registration can serve a whole batch graph. Arithmetic matches the plain
// functions above operation for operation.

struct EmbeddingVars {
  Var lift_weight, lift_bias;
};
struct MHAVars {
  Var w_query, w_key, w_value, w_out;
  std::size_t n_heads = 1;
};
struct EncoderLayerVars {
  MHAVars mha;
  Var w1, b1, w2, b2;
  Var gamma1, beta1, gamma2, beta2;
  double eps = 1e-5;
};

Var embed_features(GradTape& tape, std::span<const double> x,
                   const EmbeddingVars& p);
Var scaled_dot_product_attention(GradTape& tape, Var q, Var k, Var v);
Var multi_head_attention(GradTape& tape, Var x, const MHAVars& p);
Var transformer_encoder_layer(GradTape& tape, Var x,
                              const EncoderLayerVars& p);

}  // namespace hpcnn

#endif  // HPCNN_ATTENTION_HPP_

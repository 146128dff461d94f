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

#ifndef HPCNN_SNN_HPP_
#define HPCNN_SNN_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "hpcnn/autodiff.hpp"
#include "hpcnn/tensor.hpp"

namespace hpcnn {

// Leaky integrate-and-fire neuron: U = beta*V + I, spike when U >= threshold,
// hard reset to zero. The arctan surrogate replaces the Heaviside derivative
// on the backward pass.
struct LIFParams {
  double beta = 0.9;             // membrane decay, in [0, 1)
  double v_threshold = 1.0;      // > 0
  double surrogate_alpha = 2.0;  // > 0
  void validate() const;
};

// Forward nonlinearity selector. `binary` is the deployment behaviour;
// `smooth` replaces the hard threshold by the sigmoid-like primitive whose
// exact derivative is the arctan surrogate, which makes the whole network
// differentiable for finite-difference verification.
enum class SpikeMode { binary, smooth };

bool is_binary(const Tensor& t);

// Tensor whose leading axis is time and whose entries are all 0 or 1.
class SpikeTrain {
 public:
  explicit SpikeTrain(Tensor data);
  const Tensor& data() const { return data_; }
  std::size_t timesteps() const { return data_.dim(0); }

 private:
  Tensor data_;
};

double surrogate_gradient(double membrane, const LIFParams& p);
Tensor surrogate_gradient(const Tensor& membrane, const LIFParams& p);

struct LifStepResult {
  Tensor v_next;
  Tensor spikes;
};

// One membrane update: U = beta*V + I; S = [U >= theta]; V' = U*(1-S).
LifStepResult lif_step(const Tensor& v, const Tensor& input, const LIFParams& p);

// Folds lif_step over the leading time axis starting from V = 0.
SpikeTrain lif_run(const Tensor& inputs_time_first, const LIFParams& p);

// Direct encoding: the same analog tensor is presented at each of the T
// timesteps and the LIF layer binarizes it.
SpikeTrain direct_encode(const Tensor& x, std::size_t timesteps,
                         const LIFParams& p);

// Softmax-free spike attention. Per timestep: Q, K, V are LIF-spiked linear
// projections (binary), scores Q K^T V are non-negative integers, and the
// output is the LIF-spiked rescaled score map.
struct SSAParams {
  Tensor w_query, w_key, w_value;  // [d x d]
  double score_scale = 0.125;      // > 0
  LIFParams lif;
  void validate() const;
};

SpikeTrain spiking_self_attention(const SpikeTrain& x, const SSAParams& p);

struct SpikingConvParams {
  Tensor kernel;  // [C_out x C_in x K]
  std::size_t stride = 1;
  std::size_t padding = 0;
  LIFParams lif;
};

// Per timestep: conv1d then LIF, with membrane state carried across time.
SpikeTrain snn_encode(const SpikeTrain& x, const SpikingConvParams& p);

struct SpikingLinearParams {
  Tensor weight;  // [m x k]
  Tensor bias;    // [k]
  LIFParams lif;
};

// Per timestep: affine map then LIF, with membrane state carried across time.
SpikeTrain snn_decode(const SpikeTrain& x, const SpikingLinearParams& p);

// Spike-rate readout: mean over the time axis, values in [0, 1].
Tensor rate_decode(const SpikeTrain& s);

// --- Tape builders. Spike trains on the tape are a vector of per-timestep
// variables; membrane state is threaded through LifCell.

Var spike(GradTape& tape, Var membrane, const LIFParams& p, SpikeMode mode);

struct LifCell {
  LIFParams params;
  SpikeMode mode = SpikeMode::binary;
  Var v;  // current membrane node
};

LifCell make_lif_cell(GradTape& tape, std::vector<std::size_t> state_shape,
                      const LIFParams& p, SpikeMode mode);
Var lif_cell_step(GradTape& tape, LifCell& cell, Var input);

std::vector<Var> direct_encode(GradTape& tape, Var x, std::size_t timesteps,
                               const LIFParams& p, SpikeMode mode);

struct SSAVars {
  Var w_query, w_key, w_value;
  double score_scale = 0.125;
  LIFParams lif;
};

std::vector<Var> spiking_self_attention(GradTape& tape,
                                        std::span<const Var> x_t,
                                        const SSAVars& p, SpikeMode mode);

std::vector<Var> snn_encode(GradTape& tape, std::span<const Var> x_t, Var kernel,
                            std::size_t stride, std::size_t padding,
                            const LIFParams& p, SpikeMode mode);

std::vector<Var> snn_decode(GradTape& tape, std::span<const Var> x_t, Var weight,
                            Var bias, const LIFParams& p, SpikeMode mode);

Var rate_decode(GradTape& tape, std::span<const Var> spikes_t);

}  // namespace hpcnn

#endif  // HPCNN_SNN_HPP_

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

#include "hpcnn/snn.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hpcnn/errors.hpp"

namespace hpcnn {

void LIFParams::validate() const {
  if (beta < 0.0 || beta >= 1.0) {
    throw ConfigError("LIF: beta must lie in [0, 1), got " + std::to_string(beta));
  }
  if (v_threshold <= 0.0) throw ConfigError("LIF: threshold must be positive");
  if (surrogate_alpha <= 0.0) throw ConfigError("LIF: alpha must be positive");
}

bool is_binary(const Tensor& t) {
  for (double v : t.values()) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

SpikeTrain::SpikeTrain(Tensor data) : data_(std::move(data)) {
  if (data_.rank() < 2) {
    throw UsageError("SpikeTrain: expected shape [T x ...], got " +
                     data_.shape_string());
  }
  if (!is_binary(data_)) {
    throw ContractError("SpikeTrain: values must all be 0 or 1");
  }
}

double surrogate_gradient(double membrane, const LIFParams& p) {
  const double z = (std::numbers::pi / 2.0) * p.surrogate_alpha *
                   (membrane - p.v_threshold);
  return p.surrogate_alpha / (2.0 * (1.0 + z * z));
}

Tensor surrogate_gradient(const Tensor& membrane, const LIFParams& p) {
  Tensor out = membrane;
  for (double& v : out.values()) v = surrogate_gradient(v, p);
  return out;
}

namespace {

Tensor hard_spike(const Tensor& u, const LIFParams& p) {
  Tensor s = u;
  for (double& v : s.values()) v = v >= p.v_threshold ? 1.0 : 0.0;
  return s;
}

// Smooth stand-in for the threshold: its exact derivative is the arctan
// surrogate, so autodiff and finite differences agree on the smooth network.
Tensor soft_spike(const Tensor& u, const LIFParams& p) {
  Tensor s = u;
  for (double& v : s.values()) {
    const double z = (std::numbers::pi / 2.0) * p.surrogate_alpha *
                     (v - p.v_threshold);
    v = std::atan(z) / std::numbers::pi + 0.5;
  }
  return s;
}

}  // namespace

LifStepResult lif_step(const Tensor& v, const Tensor& input, const LIFParams& p) {
  p.validate();
  if (!v.same_shape(input)) {
    throw ShapeError("lif_step: membrane " + v.shape_string() +
                     " and input " + input.shape_string() + " disagree");
  }
  const Tensor u = add(scale(v, p.beta), input);
  Tensor spikes = hard_spike(u, p);
  Tensor v_next = mul(u, affine_elem(spikes, -1.0, 1.0));
  return {std::move(v_next), std::move(spikes)};
}

SpikeTrain lif_run(const Tensor& inputs_time_first, const LIFParams& p) {
  if (inputs_time_first.rank() < 2) {
    throw UsageError("lif_run: expected [T x ...] with T >= 1, got " +
                     inputs_time_first.shape_string());
  }
  const std::size_t t_steps = inputs_time_first.dim(0);
  Tensor v = Tensor::zeros(std::vector<std::size_t>(
      inputs_time_first.shape().begin() + 1, inputs_time_first.shape().end()));
  std::vector<Tensor> spikes;
  spikes.reserve(t_steps);
  for (std::size_t t = 0; t < t_steps; ++t) {
    LifStepResult r = lif_step(v, slice_axis0(inputs_time_first, t), p);
    v = std::move(r.v_next);
    spikes.push_back(std::move(r.spikes));
  }
  return SpikeTrain(stack_axis0(spikes));
}

SpikeTrain direct_encode(const Tensor& x, std::size_t timesteps,
                         const LIFParams& p) {
  if (timesteps == 0) throw UsageError("direct_encode: need at least 1 timestep");
  std::vector<Tensor> repeated(timesteps, x);
  return lif_run(stack_axis0(repeated), p);
}

void SSAParams::validate() const {
  lif.validate();
  if (score_scale <= 0.0) {
    throw ConfigError("spiking attention: score scale must be positive");
  }
  const std::size_t d = w_query.dim(0);
  for (const Tensor* w : {&w_query, &w_key, &w_value}) {
    if (w->rank() != 2 || w->dim(0) != d || w->dim(1) != d) {
      throw ConfigError("spiking attention: projections must be square [d x d]");
    }
  }
}

SpikeTrain spiking_self_attention(const SpikeTrain& x, const SSAParams& p) {
  p.validate();
  const Tensor& data = x.data();
  if (data.rank() != 3 || data.dim(2) != p.w_query.dim(0)) {
    throw ShapeError("spiking attention: expected [T x n x d] input matching "
                     "projection width, got " + data.shape_string());
  }
  const std::size_t t_steps = data.dim(0);
  const std::vector<std::size_t> state_shape{data.dim(1), data.dim(2)};
  Tensor vq = Tensor::zeros(state_shape), vk = vq, vv = vq, vo = vq;
  std::vector<Tensor> out;
  out.reserve(t_steps);
  for (std::size_t t = 0; t < t_steps; ++t) {
    const Tensor x_t = slice_axis0(data, t);
    LifStepResult q = lif_step(vq, matmul(x_t, p.w_query), p.lif);
    vq = std::move(q.v_next);
    LifStepResult k = lif_step(vk, matmul(x_t, p.w_key), p.lif);
    vk = std::move(k.v_next);
    LifStepResult v = lif_step(vv, matmul(x_t, p.w_value), p.lif);
    vv = std::move(v.v_next);
    const Tensor scores = matmul(matmul_nt(q.spikes, k.spikes), v.spikes);
    LifStepResult o = lif_step(vo, scale(scores, p.score_scale), p.lif);
    vo = std::move(o.v_next);
    out.push_back(std::move(o.spikes));
  }
  return SpikeTrain(stack_axis0(out));
}

SpikeTrain snn_encode(const SpikeTrain& x, const SpikingConvParams& p) {
  p.lif.validate();
  const Tensor& data = x.data();
  if (data.rank() != 3) {
    throw ShapeError("snn_encode: expected [T x C x L] input, got " +
                     data.shape_string());
  }
  const std::size_t t_steps = data.dim(0);
  Tensor v;
  std::vector<Tensor> out;
  out.reserve(t_steps);
  for (std::size_t t = 0; t < t_steps; ++t) {
    Tensor current = conv1d(slice_axis0(data, t), p.kernel, p.stride, p.padding);
    if (t == 0) v = Tensor::zeros(current.shape());
    LifStepResult r = lif_step(v, current, p.lif);
    v = std::move(r.v_next);
    out.push_back(std::move(r.spikes));
  }
  return SpikeTrain(stack_axis0(out));
}

SpikeTrain snn_decode(const SpikeTrain& x, const SpikingLinearParams& p) {
  p.lif.validate();
  const Tensor& data = x.data();
  if (data.rank() != 2 || data.dim(1) != p.weight.dim(0)) {
    throw ShapeError("snn_decode: expected [T x m] input matching weight rows, "
                     "got " + data.shape_string() + " for weight " +
                     p.weight.shape_string());
  }
  const Tensor currents = add_rowvec(matmul(data, p.weight), p.bias);
  return lif_run(currents, p.lif);
}

Tensor rate_decode(const SpikeTrain& s) {
  const Tensor& data = s.data();
  const std::size_t t_steps = data.dim(0);
  Tensor acc = slice_axis0(data, 0);
  for (std::size_t t = 1; t < t_steps; ++t) {
    acc = add(acc, slice_axis0(data, t));
  }
  return scale(acc, 1.0 / static_cast<double>(t_steps));
}

// --- Tape builders --------------------------------------------------------

Var spike(GradTape& tape, Var membrane, const LIFParams& p, SpikeMode mode) {
  auto forward = [p, mode](const Tensor& u) {
    return mode == SpikeMode::binary ? hard_spike(u, p) : soft_spike(u, p);
  };
  auto backward = [p](const Tensor& u, const Tensor& g) {
    return mul(g, surrogate_gradient(u, p));
  };
  return tape.unary_custom(membrane, "spike", forward, backward);
}

LifCell make_lif_cell(GradTape& tape, std::vector<std::size_t> state_shape,
                      const LIFParams& p, SpikeMode mode) {
  p.validate();
  return LifCell{p, mode, tape.constant(Tensor::zeros(std::move(state_shape)))};
}

Var lif_cell_step(GradTape& tape, LifCell& cell, Var input) {
  Var u = tape.add(tape.scale(cell.v, cell.params.beta), input);
  Var s = spike(tape, u, cell.params, cell.mode);
  cell.v = tape.mul(u, tape.affine_elem(s, -1.0, 1.0));
  return s;
}

std::vector<Var> direct_encode(GradTape& tape, Var x, std::size_t timesteps,
                               const LIFParams& p, SpikeMode mode) {
  if (timesteps == 0) throw UsageError("direct_encode: need at least 1 timestep");
  LifCell cell = make_lif_cell(tape, x.value().shape(), p, mode);
  std::vector<Var> out;
  out.reserve(timesteps);
  for (std::size_t t = 0; t < timesteps; ++t) {
    out.push_back(lif_cell_step(tape, cell, x));
  }
  return out;
}

std::vector<Var> spiking_self_attention(GradTape& tape,
                                        std::span<const Var> x_t,
                                        const SSAVars& p, SpikeMode mode) {
  if (x_t.empty()) throw UsageError("spiking attention: empty spike train");
  const std::vector<std::size_t> state_shape = x_t[0].value().shape();
  LifCell cq = make_lif_cell(tape, state_shape, p.lif, mode);
  LifCell ck = make_lif_cell(tape, state_shape, p.lif, mode);
  LifCell cv = make_lif_cell(tape, state_shape, p.lif, mode);
  LifCell co = make_lif_cell(tape, state_shape, p.lif, mode);
  std::vector<Var> out;
  out.reserve(x_t.size());
  for (Var x : x_t) {
    Var q = lif_cell_step(tape, cq, tape.matmul(x, p.w_query));
    Var k = lif_cell_step(tape, ck, tape.matmul(x, p.w_key));
    Var v = lif_cell_step(tape, cv, tape.matmul(x, p.w_value));
    Var scores = tape.matmul(tape.matmul_nt(q, k), v);
    out.push_back(lif_cell_step(tape, co, tape.scale(scores, p.score_scale)));
  }
  return out;
}

std::vector<Var> snn_encode(GradTape& tape, std::span<const Var> x_t, Var kernel,
                            std::size_t stride, std::size_t padding,
                            const LIFParams& p, SpikeMode mode) {
  if (x_t.empty()) throw UsageError("snn_encode: empty spike train");
  std::vector<Var> out;
  out.reserve(x_t.size());
  LifCell cell{p, mode, Var{}};
  for (std::size_t t = 0; t < x_t.size(); ++t) {
    Var current = tape.conv1d(x_t[t], kernel, stride, padding);
    if (t == 0) {
      cell = make_lif_cell(tape, current.value().shape(), p, mode);
    }
    out.push_back(lif_cell_step(tape, cell, current));
  }
  return out;
}

std::vector<Var> snn_decode(GradTape& tape, std::span<const Var> x_t, Var weight,
                            Var bias, const LIFParams& p, SpikeMode mode) {
  if (x_t.empty()) throw UsageError("snn_decode: empty spike train");
  const std::size_t width = weight.value().dim(1);
  LifCell cell = make_lif_cell(tape, {x_t[0].value().dim(0), width}, p, mode);
  std::vector<Var> out;
  out.reserve(x_t.size());
  for (Var x : x_t) {
    Var current = tape.add_rowvec(tape.matmul(x, weight), bias);
    out.push_back(lif_cell_step(tape, cell, current));
  }
  return out;
}

Var rate_decode(GradTape& tape, std::span<const Var> spikes_t) {
  if (spikes_t.empty()) throw UsageError("rate_decode: empty spike train");
  Var acc = spikes_t[0];
  for (std::size_t t = 1; t < spikes_t.size(); ++t) {
    acc = tape.add(acc, spikes_t[t]);
  }
  return tape.scale(acc, 1.0 / static_cast<double>(spikes_t.size()));
}

}  // namespace hpcnn

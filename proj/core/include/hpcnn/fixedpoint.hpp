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

#ifndef HPCNN_FIXEDPOINT_HPP_
#define HPCNN_FIXEDPOINT_HPP_

#include <string>
#include <string_view>

#include "hpcnn/tensor.hpp"

namespace hpcnn {

enum class RoundingMode { nearest_even, truncate };
enum class OverflowMode { saturate, wrap };

std::string_view to_string(RoundingMode m);
std::string_view to_string(OverflowMode m);
RoundingMode rounding_from_string(std::string_view s);
OverflowMode overflow_from_string(std::string_view s);

// Signed fixed-point format <W,I>: W total bits, I integer bits including
// the sign bit (the ap_fixed convention). Step is 2^(I-W); the representable
// range is [-2^(I-1), 2^(I-1) - step]. Grid emulation in doubles is exact up
// to W = 53 (the double mantissa); larger W is accepted but sub-ulp grid
// points collapse.
struct FixedPointFormat {
  int total_bits = 16;
  int integer_bits = 6;
  RoundingMode rounding = RoundingMode::nearest_even;
  OverflowMode overflow = OverflowMode::saturate;

  void validate() const;  // requires 1 <= I <= W <= 64
  double step() const;
  double min_value() const;
  double max_value() const;

  // Renders as "fixed<W,I>".
  std::string to_string() const;
  // Accepts "fixed<W,I>" or the bare "W,I" pair; rounding/overflow keep the
  // defaults (nearest-even, saturate).
  static FixedPointFormat parse(std::string_view text);

  bool operator==(const FixedPointFormat&) const = default;
};

// Nearest-grid-point quantization per the format's rounding mode, then
// saturation or two's-complement wrap-around. The result is always exactly
// representable in the format.
double quantize_value(double x, const FixedPointFormat& f);

// Elementwise quantize_value; shape preserved; idempotent.
Tensor quantize_tensor(const Tensor& t, const FixedPointFormat& f);

}  // namespace hpcnn

#endif  // HPCNN_FIXEDPOINT_HPP_

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

#include "hpcnn/fixedpoint.hpp"

#include <cmath>
#include <charconv>

#include "hpcnn/errors.hpp"

namespace hpcnn {

std::string_view to_string(RoundingMode m) {
  return m == RoundingMode::nearest_even ? "nearest-even" : "truncate";
}

std::string_view to_string(OverflowMode m) {
  return m == OverflowMode::saturate ? "saturate" : "wrap";
}

RoundingMode rounding_from_string(std::string_view s) {
  if (s == "nearest-even") return RoundingMode::nearest_even;
  if (s == "truncate") return RoundingMode::truncate;
  throw ConfigError("unknown rounding mode '" + std::string(s) + "'");
}

OverflowMode overflow_from_string(std::string_view s) {
  if (s == "saturate") return OverflowMode::saturate;
  if (s == "wrap") return OverflowMode::wrap;
  throw ConfigError("unknown overflow mode '" + std::string(s) + "'");
}

void FixedPointFormat::validate() const {
  if (integer_bits < 1 || integer_bits > total_bits || total_bits > 64) {
    throw ConfigError("fixed-point format requires 1 <= I <= W <= 64, got <" +
                      std::to_string(total_bits) + "," +
                      std::to_string(integer_bits) + ">");
  }
}

double FixedPointFormat::step() const {
  return std::ldexp(1.0, integer_bits - total_bits);
}

double FixedPointFormat::min_value() const {
  return -std::ldexp(1.0, integer_bits - 1);
}

double FixedPointFormat::max_value() const {
  return std::ldexp(1.0, integer_bits - 1) - step();
}

std::string FixedPointFormat::to_string() const {
  return "fixed<" + std::to_string(total_bits) + "," +
         std::to_string(integer_bits) + ">";
}

FixedPointFormat FixedPointFormat::parse(std::string_view text) {
  std::string_view body = text;
  if (body.starts_with("fixed<") && body.ends_with(">")) {
    body = body.substr(6, body.size() - 7);
  }
  const std::size_t comma = body.find(',');
  if (comma == std::string_view::npos) {
    throw ConfigError("cannot parse fixed-point format '" + std::string(text) +
                      "', expected fixed<W,I> or W,I");
  }
  auto parse_int = [&](std::string_view s) {
    int value = 0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
      throw ConfigError("cannot parse fixed-point format '" + std::string(text) +
                        "'");
    }
    return value;
  };
  FixedPointFormat f;
  f.total_bits = parse_int(body.substr(0, comma));
  f.integer_bits = parse_int(body.substr(comma + 1));
  f.validate();
  return f;
}

double quantize_value(double x, const FixedPointFormat& f) {
  f.validate();
  if (!std::isfinite(x)) {
    throw NumericError("quantize_value: input is not finite");
  }
  const double step = f.step();
  // Division by a power of two is exact, so rounding happens purely in the
  // integer-grid domain.
  const double units = x / step;
  double k;
  if (f.rounding == RoundingMode::nearest_even) {
    k = std::nearbyint(units);  // FE_TONEAREST: ties to even
  } else {
    k = std::floor(units);
  }
  const double k_min = -std::ldexp(1.0, f.total_bits - 1);
  const double k_max = std::ldexp(1.0, f.total_bits - 1) - 1.0;
  if (f.overflow == OverflowMode::saturate) {
    if (k > k_max) k = k_max;
    if (k < k_min) k = k_min;
  } else {
    // Two's-complement wrap modulo 2^W grid units (equivalently modulo 2^I
    // in value units). fmod is exact on integral doubles.
    const double span = std::ldexp(1.0, f.total_bits);
    double m = std::fmod(k - k_min, span);
    if (m < 0.0) m += span;
    k = m + k_min;
  }
  return k * step;
}

Tensor quantize_tensor(const Tensor& t, const FixedPointFormat& f) {
  f.validate();
  Tensor out = t;
  for (double& v : out.values()) v = quantize_value(v, f);
  return out;
}

}  // namespace hpcnn

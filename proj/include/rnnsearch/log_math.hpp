// include/rnnsearch/log_math.hpp

// Copyright 2026  The rnnsearch authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace rnnsearch {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn10 = 2.302585092994045684;
inline constexpr long double kLn10Long = 2.302585092994045684017991454684364208L;

/// log10 to natural log, rounded once from extended precision.
inline double Log10ToLn(double v) { return static_cast<double>(static_cast<long double>(v) * kLn10Long); }

/// -ln(exp(-a) + exp(-b)) for neg-log scores.
inline double NegLogAdd(double a, double b) {
  if (a > b) std::swap(a, b);
  if (b == kInf) return a;
  return a - std::log1p(std::exp(a - b));
}

/// -ln sum_i exp(-s_i), shifted by the minimum.
inline double NegLogSum(std::span<const double> scores) {
  if (scores.empty()) return kInf;
  double lo = *std::min_element(scores.begin(), scores.end());
  if (lo == kInf) return kInf;
  double acc = 0.0;
  for (double s : scores) acc += std::exp(lo - s);
  return lo - std::log(acc);
}

/// ln sum_i exp(x_i).
inline double LogSumExp(std::span<const double> xs) {
  if (xs.empty()) return -kInf;
  double hi = *std::max_element(xs.begin(), xs.end());
  if (hi == -kInf) return -kInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

}  // namespace rnnsearch

// src/batch/batcher.cc

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

#include "rnnsearch/batch/batcher.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "rnnsearch/errors.hpp"

namespace rnnsearch {

std::vector<LmRequest> Schedule(std::span<const LmRequest> pending, std::size_t capacity) {
  if (capacity < 1) throw ConfigError("batch capacity must be at least 1");
  std::vector<LmRequest> batch;
  std::unordered_set<HistoryId> seen;
  for (const auto& r : pending) {
    if (r.trigger == RequestTrigger::kDemanded && seen.insert(r.history).second) batch.push_back(r);
  }
  if (batch.size() > capacity) throw BatchOverflow(batch.size(), capacity);

  std::vector<LmRequest> spec;
  for (const auto& r : pending) {
    if (r.trigger == RequestTrigger::kSpeculative && !seen.count(r.history)) spec.push_back(r);
  }
  std::sort(spec.begin(), spec.end(), [](const LmRequest& a, const LmRequest& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.gap != b.gap) return a.gap < b.gap;
    return a.history < b.history;
  });
  for (const auto& r : spec) {
    if (batch.size() >= capacity) break;
    if (seen.insert(r.history).second) batch.push_back(r);
  }
  return batch;
}

void CostModel::Validate() const {
  if (!(latency_ms >= 0.0) || !std::isfinite(latency_ms)) {
    throw ConfigError("batch latency must be finite and nonnegative");
  }
  if (!(per_item_ms > 0.0) || !std::isfinite(per_item_ms)) {
    throw ConfigError("per-item batch cost must be finite and positive");
  }
}

std::vector<double> SimulateCost(const CostModel& model, std::span<const std::size_t> sizes) {
  model.Validate();
  std::vector<double> out;
  out.reserve(sizes.size());
  for (std::size_t b : sizes) {
    if (b < 1) throw ConfigError("batch size must be at least 1");
    out.push_back(model.PerHistoryMs(b));
  }
  return out;
}

ThroughputReport MakeThroughputReport(const CostModel& model, std::span<const BatchRecord> trace) {
  ThroughputReport r;
  for (const auto& b : trace) {
    ++r.batches;
    r.histories += b.histories.size();
    r.simulated_ms += model.BatchMs(b.histories.size());
  }
  if (r.batches > 0) {
    r.mean_occupancy = static_cast<double>(r.histories) / static_cast<double>(r.batches);
  }
  return r;
}

}  // namespace rnnsearch

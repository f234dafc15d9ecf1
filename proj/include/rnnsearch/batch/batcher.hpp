// include/rnnsearch/batch/batcher.hpp

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

#include <cstddef>
#include <span>
#include <vector>

#include "rnnsearch/lm/history.hpp"

namespace rnnsearch {

enum class RequestTrigger { kDemanded, kSpeculative };

/// A history waiting for its recurrent step.
struct LmRequest {
  HistoryId history = kNoHistory;
  RequestTrigger trigger = RequestTrigger::kSpeculative;
  /// Fewest tree states between any of the history's hypotheses and a word end.
  int distance = 0;
  /// Best hypothesis score of the history minus the frame-best score.
  double gap = 0.0;
};

/// Builds one batch of at most `capacity` histories: every demanded request, then
/// speculative ones by (distance, gap, history id). Each history appears once.
/// Throws BatchOverflow when the demanded requests alone exceed the capacity.
std::vector<LmRequest> Schedule(std::span<const LmRequest> pending, std::size_t capacity);

/// Affine batch latency c(B) = latency_ms + per_item_ms * B.
struct CostModel {
  double latency_ms = 3.3;
  double per_item_ms = 0.2;

  void Validate() const;
  double BatchMs(std::size_t batch_size) const {
    return latency_ms + per_item_ms * static_cast<double>(batch_size);
  }
  double PerHistoryMs(std::size_t batch_size) const {
    return BatchMs(batch_size) / static_cast<double>(batch_size);
  }
};

/// c(B)/B for each requested size. Sizes must be at least 1.
std::vector<double> SimulateCost(const CostModel& model, std::span<const std::size_t> sizes);

/// One forwarded batch as issued by the decoder.
struct BatchRecord {
  int frame = 0;
  std::size_t demanded = 0;
  std::vector<HistoryId> histories;
};

struct ThroughputReport {
  std::size_t batches = 0;
  std::size_t histories = 0;
  double simulated_ms = 0.0;
  double mean_occupancy = 0.0;
};

ThroughputReport MakeThroughputReport(const CostModel& model, std::span<const BatchRecord> trace);

}  // namespace rnnsearch

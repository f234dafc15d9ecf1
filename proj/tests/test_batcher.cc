// tests/test_batcher.cc

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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "doctest.h"

#include "instances.hpp"
#include "rnnsearch/batch/batcher.hpp"
#include "rnnsearch/errors.hpp"

using namespace rnnsearch;

namespace {

LmRequest Demanded(HistoryId h) { return {h, RequestTrigger::kDemanded, 0, 0.0}; }
LmRequest Speculative(HistoryId h, int distance, double gap) {
  return {h, RequestTrigger::kSpeculative, distance, gap};
}

std::vector<HistoryId> Ids(const std::vector<LmRequest>& batch) {
  std::vector<HistoryId> out;
  for (const auto& r : batch) out.push_back(r.history);
  return out;
}

std::vector<LmRequest> RandomRequests(synth::Rng& rng, int count, double demanded_rate) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<LmRequest> out;
  for (int i = 0; i < count; ++i) {
    const auto h = static_cast<HistoryId>(rng() % 1000);
    if (u(rng) < demanded_rate) {
      out.push_back(Demanded(h));
    } else {
      // Coarse gaps so ties on (distance, gap) occur.
      out.push_back(Speculative(h, static_cast<int>(rng() % 4), std::floor(u(rng) * 4.0) / 2.0));
    }
  }
  return out;
}

/// Full-sort oracle: demanded first in input order, then speculative sorted by key,
/// dropping repeated histories, truncated to capacity.
std::vector<HistoryId> SortOracle(std::vector<LmRequest> pending, std::size_t capacity) {
  std::vector<HistoryId> out;
  std::set<HistoryId> seen;
  for (const auto& r : pending) {
    if (r.trigger == RequestTrigger::kDemanded && seen.insert(r.history).second) out.push_back(r.history);
  }
  std::vector<LmRequest> spec;
  for (const auto& r : pending) {
    if (r.trigger == RequestTrigger::kSpeculative) spec.push_back(r);
  }
  std::sort(spec.begin(), spec.end(), [](const LmRequest& a, const LmRequest& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.gap != b.gap) return a.gap < b.gap;
    return a.history < b.history;
  });
  for (const auto& r : spec) {
    if (out.size() >= capacity) break;
    if (seen.insert(r.history).second) out.push_back(r.history);
  }
  return out;
}

}  // namespace

TEST_CASE("schedule fill rule") {
  std::vector<LmRequest> pending{Demanded(1), Demanded(2), Demanded(3)};
  for (HistoryId h = 10; h < 20; ++h) pending.push_back(Speculative(h, static_cast<int>(h % 3), 0.1 * h));
  const auto batch = Schedule(pending, 8);
  REQUIRE(batch.size() == 8);
  CHECK(Ids(batch) == std::vector<HistoryId>{1, 2, 3, 12, 15, 18, 10, 13});
  for (int i = 0; i < 3; ++i) CHECK(batch[static_cast<std::size_t>(i)].trigger == RequestTrigger::kDemanded);

  const auto order = Schedule(std::vector<LmRequest>{Speculative(7, 2, 0.1), Speculative(9, 1, 0.5)}, 1);
  CHECK(Ids(order) == std::vector<HistoryId>{9});
  CHECK(Schedule(std::vector<LmRequest>{}, 4).empty());
  CHECK(Ids(Schedule(std::vector<LmRequest>{Speculative(5, 0, 0.0), Demanded(5)}, 4)) ==
        std::vector<HistoryId>{5});
}

TEST_CASE("schedule overflow") {
  std::vector<LmRequest> pending;
  for (HistoryId h = 0; h < 11; ++h) pending.push_back(Demanded(h));
  try {
    Schedule(pending, 8);
    FAIL("expected overflow");
  } catch (const BatchOverflow& e) {
    CHECK(e.overflow() == 3);
  }
  CHECK_THROWS_AS(Schedule(pending, 0), ConfigError);
  CHECK(Schedule(pending, 11).size() == 11);
}

TEST_CASE("schedule against a full sort") {
  synth::Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pending = RandomRequests(rng, 100, trial % 2 == 0 ? 0.05 : 0.15);
    std::set<HistoryId> demanded;
    for (const auto& r : pending) {
      if (r.trigger == RequestTrigger::kDemanded) demanded.insert(r.history);
    }
    const std::size_t capacity = trial % 3 == 0 ? 32 : 16 + static_cast<std::size_t>(trial % 20);
    if (demanded.size() > capacity) {
      CHECK_THROWS_AS(Schedule(pending, capacity), BatchOverflow);
      continue;
    }
    const auto batch = Schedule(pending, capacity);
    CHECK(Ids(batch) == SortOracle(pending, capacity));
    // Demanded requests are never left for a later batch.
    const auto ids = Ids(batch);
    const std::set<HistoryId> in(ids.begin(), ids.end());
    CHECK(in.size() == ids.size());
    for (HistoryId h : demanded) CHECK(in.count(h) == 1);
  }
}

TEST_CASE("cost model") {
  const CostModel model;
  const std::vector<std::size_t> sizes{1, 32, 50};
  const auto cost = SimulateCost(model, sizes);
  // Left end of the forwarding-time figure: about 3.5 ms per history.
  CHECK(cost[0] == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(cost[1] <= 0.25 * cost[0]);
  CHECK(cost[2] == doctest::Approx((3.3 + 0.2 * 50) / 50).epsilon(1e-12));
  CHECK(cost[2] == doctest::Approx(0.266).epsilon(1e-12));
  CHECK(model.PerHistoryMs(1000000) == doctest::Approx(model.per_item_ms).epsilon(1e-4));

  const CostModel other{1.0, 0.05};
  double previous = kInf;
  for (std::size_t b = 1; b <= 256; ++b) {
    const double c = other.PerHistoryMs(b);
    CHECK(c < previous);
    previous = c;
  }
  CHECK_THROWS_AS((CostModel{-1.0, 0.2}).Validate(), ConfigError);
  CHECK_THROWS_AS((CostModel{1.0, 0.0}).Validate(), ConfigError);
  const std::vector<std::size_t> zero{0};
  CHECK_THROWS_AS(SimulateCost(model, zero), ConfigError);
}

TEST_CASE("cost model matches the figure axes") {
  // The per-history curve is only readable from the figure's axes: 0..4 ms over
  // 0..50 histories. The default endpoints must land inside that frame.
  std::ifstream in(RNNSEARCH_FIGURE_SOURCE);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string doc = buf.str();
  const auto caption = doc.find("divided by the number of histories in the batch}");
  REQUIRE(caption != std::string::npos);
  const auto begin = doc.rfind("\\begin{picture}", caption);
  REQUIRE(begin != std::string::npos);
  const std::string figure = doc.substr(begin, caption - begin);
  auto largest = [&](const std::regex& re) {
    double v = 0.0;
    for (auto it = std::sregex_iterator(figure.begin(), figure.end(), re); it != std::sregex_iterator(); ++it) {
      v = std::max(v, std::stod((*it)[1]));
    }
    return v;
  };
  const double y_max = largest(std::regex(R"(\[r\]\{\\strut\{\}\$([0-9.]+)\$)"));
  const double x_max = largest(std::regex(R"(\(0,0\)\{\\strut\{\}\$([0-9.]+)\$)"));
  CHECK(y_max == 4.0);
  CHECK(x_max == 50.0);
  const CostModel model;
  CHECK(model.PerHistoryMs(1) <= y_max);
  CHECK(model.PerHistoryMs(1) >= 0.75 * y_max);
  CHECK(model.PerHistoryMs(static_cast<std::size_t>(x_max)) <= 0.1 * y_max);
}

TEST_CASE("throughput report") {
  const CostModel model;
  const auto empty = MakeThroughputReport(model, std::vector<BatchRecord>{});
  CHECK(empty.batches == 0);
  CHECK(empty.histories == 0);
  CHECK(empty.simulated_ms == 0.0);
  CHECK(empty.mean_occupancy == 0.0);

  const std::vector<BatchRecord> four{{3, 1, {1, 2, 3, 4}}};
  const auto one = MakeThroughputReport(model, four);
  CHECK(one.batches == 1);
  CHECK(one.histories == 4);
  CHECK(one.mean_occupancy == 4.0);
  CHECK(one.simulated_ms == doctest::Approx(3.3 + 0.8));

  synth::Rng rng(9);
  std::vector<BatchRecord> trace;
  HistoryId next = 0;
  while (next < 1000) {
    BatchRecord b;
    b.frame = static_cast<int>(trace.size());
    const auto size = std::min<HistoryId>(1 + static_cast<HistoryId>(rng() % 40), 1000 - next);
    for (HistoryId i = 0; i < size; ++i) b.histories.push_back(next++);
    b.demanded = rng() % (b.histories.size() + 1);
    trace.push_back(std::move(b));
  }
  double ms = 0.0;
  std::size_t histories = 0;
  for (const auto& b : trace) {
    ms += 3.3 + 0.2 * static_cast<double>(b.histories.size());
    histories += b.histories.size();
  }
  const auto report = MakeThroughputReport(model, trace);
  CHECK(report.batches == trace.size());
  CHECK(report.histories == 1000);
  CHECK(histories == 1000);
  CHECK(report.simulated_ms == doctest::Approx(ms).epsilon(1e-12));
  CHECK(report.mean_occupancy == doctest::Approx(1000.0 / static_cast<double>(trace.size())));
}

TEST_CASE("decode traces") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = testing::MakeSmallInstance(seed);
    auto& m = inst.models;
    for (std::size_t capacity : {1u, 4u, 32u}) {
      auto cfg = inst.cfg;
      cfg.batch_size = capacity;
      cfg.recombination_n = 2;
      const auto r = Decode(inst.emissions, m.tree, *m.scorer, m.topology, cfg);
      std::set<HistoryId> forwarded;
      int frame = -1;
      for (const auto& b : r.stats.batches) {
        CHECK(b.histories.size() <= capacity);
        CHECK(b.demanded <= b.histories.size());
        CHECK(b.frame >= frame);
        frame = b.frame;
        for (HistoryId h : b.histories) CHECK(forwarded.insert(h).second);
      }
      // The sentence-begin history is stepped when the store creates it.
      CHECK(forwarded.size() + 1 == r.stats.forwards);
      const auto report = MakeThroughputReport(cfg.cost, r.stats.batches);
      CHECK(report.simulated_ms == doctest::Approx(r.stats.lm_simulated_ms));
    }
  }
}

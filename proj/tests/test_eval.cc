// tests/test_eval.cc

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
#include <map>

#include "doctest.h"

#include "instances.hpp"
#include "rnnsearch/errors.hpp"
#include "rnnsearch/eval/metrics.hpp"
#include "rnnsearch/eval/pipeline.hpp"

using namespace rnnsearch;

namespace {

using Words = std::vector<std::string>;

/// Plain edit distance, one row at a time.
std::size_t EditDistance(const Words& a, const Words& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::vector<std::size_t> cur(b.size() + 1);
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    }
    prev = std::move(cur);
  }
  return prev[b.size()];
}

Words RandomWords(synth::Rng& rng, std::size_t max_len) {
  static const Words alphabet{"a", "b", "c", "d"};
  Words w(rng() % (max_len + 1));
  for (auto& s : w) s = alphabet[rng() % alphabet.size()];
  return w;
}

struct SmallCorpus {
  ModelSet models;
  CorpusManifest manifest;
  std::map<std::string, EmissionMatrix> emissions;
  EmissionLoader Loader() const {
    return [this](const ManifestEntry& e) { return emissions.at(e.utterance_id); };
  }
};

std::unique_ptr<SmallCorpus> MakeCorpus(std::uint64_t seed, int utterances) {
  synth::Rng rng(seed);
  synth::CorpusSpec spec;
  spec.utterances = utterances;
  spec.max_sentence_words = 5;
  auto corpus = synth::MakeSynthCorpus(rng, spec);
  auto out = std::make_unique<SmallCorpus>();
  out->models = MakeModelSet(corpus.lexicon, std::make_shared<const BackoffLm>(corpus.arpa),
                             std::make_shared<const RecurrentLm>(corpus.rnn), {}, {});
  out->manifest = synth::SynthManifest(corpus, "");
  for (auto& em : corpus.emissions) out->emissions.emplace(em.utterance_id(), std::move(em));
  return out;
}

PipelineConfig Finite(const std::string& strategy) {
  PipelineConfig cfg;
  cfg.strategy = ParseStrategy(strategy);
  cfg.decode.beam = 10.0;
  return cfg;
}

}  // namespace

TEST_CASE("wer examples") {
  const Words abc{"a", "b", "c"};
  CHECK(Wer(abc, abc) == WerCounts{0, 0, 0, 3});
  const auto del = Wer(abc, Words{"a", "c"});
  CHECK(del == WerCounts{0, 1, 0, 3});
  CHECK(del.Wer() == doctest::Approx(1.0 / 3.0));
  const auto swap = Wer(Words{"a", "b"}, Words{"b", "a"});
  CHECK(swap.Errors() == 2);
  CHECK(swap.Wer() == 1.0);
  CHECK(Wer(Words{}, Words{}).Wer() == 0.0);
  CHECK(Wer(abc, Words{}) == WerCounts{0, 3, 0, 3});
  CHECK_THROWS_AS(Wer(Words{}, Words{"a"}), DataError);

  WerCounts total;
  total += del;
  total += Wer(Words{"x"}, Words{"x", "y"});
  CHECK(total == WerCounts{0, 1, 1, 4});
  CHECK(total.Wer() == 0.5);
}

TEST_CASE("wer against an independent edit distance") {
  synth::Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    Words ref = RandomWords(rng, 9);
    const Words hyp = RandomWords(rng, 9);
    if (ref.empty()) ref.push_back("a");
    const auto c = Wer(ref, hyp);
    CHECK(c.Errors() == EditDistance(ref, hyp));
    CHECK(c.reference_length == ref.size());
    CHECK(ref.size() - c.deletions + c.insertions == hyp.size());
    CHECK(c.substitutions + c.deletions <= ref.size());
    if (!hyp.empty()) {
      const auto back = Wer(hyp, ref);
      CHECK(back.Errors() == c.Errors());
      CHECK(back.substitutions == c.substitutions);
      CHECK(back.deletions == c.insertions);
      CHECK(back.insertions == c.deletions);
    }
  }
}

TEST_CASE("real-time factor") {
  CHECK(Rtf(5.0, 10.0).rtf == 0.5);
  CHECK(Rtf(10.0, 10.0).rtf == 1.0);
  const auto manifest = LoadManifestFile(std::string(RNNSEARCH_FIXTURES) + "/two.manifest");
  const auto r = Rtf(10.0, manifest);
  CHECK(r.audio_s == 5.0);
  CHECK(r.wallclock_s == 10.0);
  CHECK(r.rtf == 2.0);
  CHECK_THROWS_AS(Rtf(1.0, 0.0), DataError);
  CHECK_THROWS_AS(Rtf(1.0, CorpusManifest{}), DataError);
}

TEST_CASE("strategy names") {
  for (const char* name : {"backoff-1pass", "lstm-1pass(inf)", "backoff+rescore", "lstm-n2+rescore", "fullsum",
                           "fullsum+cn", "lstm-1pass(3)"}) {
    CHECK(ParseStrategy(name).Name() == name);
  }
  CHECK(ParseStrategy("lstm-1pass").n == kUnlimited);
  CHECK(ParseStrategy("lstm-1pass(2)").n == 2);
  CHECK(ParseRecombinationLimit("inf") == kUnlimited);
  CHECK(ParseRecombinationLimit("7") == 7);
  CHECK_THROWS_AS(ParseRecombinationLimit("0"), ConfigError);
  CHECK_THROWS_AS(ParseRecombinationLimit("x"), ConfigError);
  CHECK_THROWS_AS(ParseStrategy("trigram-magic"), ConfigError);
  CHECK_THROWS_AS(ParseStrategy("lstm-1pass(0)"), ConfigError);
}

TEST_CASE("corpus runs") {
  const auto c = MakeCorpus(7, 4);
  for (const char* s : {"backoff-1pass", "lstm-1pass(2)", "backoff+rescore", "lstm-n2+rescore", "fullsum", "fullsum+cn"}) {
    auto cfg = Finite(s);
    const auto a = RunCorpus(c->models, c->manifest, cfg, c->Loader());
    REQUIRE(a.utterances.size() == 4);
    std::size_t ref = 0;
    for (const auto& e : c->manifest.entries) ref += e.reference.size();
    CHECK(a.wer.reference_length == ref);
    CHECK(a.rtf.audio_s == doctest::Approx(c->manifest.TotalDuration()));
    CHECK(a.simulated_rtf > 0.0);
    WerCounts sum;
    for (const auto& u : a.utterances) {
      sum += u.wer;
      CHECK(u.wer == Wer(u.reference, u.output.words));
    }
    CHECK(sum == a.wer);
    // Same configuration, same hypotheses, in parallel too.
    cfg.jobs = 3;
    const auto b = RunCorpus(c->models, c->manifest, cfg, c->Loader());
    CHECK(b.wer == a.wer);
    CHECK(b.simulated_ms == doctest::Approx(a.simulated_ms));
    for (std::size_t i = 0; i < a.utterances.size(); ++i) {
      CHECK(a.utterances[i].output.words == b.utterances[i].output.words);
      CHECK(a.utterances[i].output.utterance_id == c->manifest.entries[i].utterance_id);
    }
  }
  auto cfg = Finite("lstm-1pass");
  cfg.jobs = 0;
  CHECK_THROWS_AS(RunCorpus(c->models, c->manifest, cfg, c->Loader()), ConfigError);
}

TEST_CASE("grid search") {
  const auto c = MakeCorpus(11, 4);
  const auto cfg = Finite("lstm-1pass(2)");
  const auto single = GridSearch({{1.0, 1.5}}, c->models, c->manifest, cfg, c->Loader());
  CHECK(single.best.scale_am == 1.0);
  CHECK(single.best.scale_lm == 1.5);
  CHECK(single.points.size() == 1);
  CHECK_THROWS_AS(GridSearch({}, c->models, c->manifest, cfg, c->Loader()), ConfigError);

  std::vector<std::pair<double, double>> grid;
  for (double am : {0.5, 1.0, 2.0}) {
    for (double lm : {0.1, 1.0, 3.0}) grid.emplace_back(am, lm);
  }
  const auto result = GridSearch(grid, c->models, c->manifest, cfg, c->Loader());
  REQUIRE(result.points.size() == 9);
  const GridPoint* best = nullptr;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto run = cfg;
    run.decode.scale_am = grid[i].first;
    run.decode.scale_lm = grid[i].second;
    const auto wer = RunCorpus(c->models, c->manifest, run, c->Loader()).wer;
    CHECK(result.points[i].wer == wer);
    CHECK(result.points[i].scale_am == grid[i].first);
    const auto& p = result.points[i];
    if (!best || p.wer.Wer() < best->wer.Wer() ||
        (p.wer.Wer() == best->wer.Wer() &&
         (p.scale_lm < best->scale_lm || (p.scale_lm == best->scale_lm && p.scale_am < best->scale_am)))) {
      best = &p;
    }
  }
  CHECK(result.best.scale_am == best->scale_am);
  CHECK(result.best.scale_lm == best->scale_lm);
  CHECK(result.best.wer == best->wer);
}

TEST_CASE("experiments") {
  const auto c = MakeCorpus(13, 1);
  ExperimentConfig ex;
  ex.strategies = {"backoff-1pass"};
  ex.base = Finite("backoff-1pass");
  const auto rows = RunExperiment(ex, c->models, c->manifest, c->Loader());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].strategy == "backoff-1pass");
  CHECK(rows[0].beam == 10.0);
  CHECK(rows[0].wer.reference_length == c->manifest.entries[0].reference.size());
  CHECK(rows[0].wallclock_rtf > 0.0);
  CHECK(rows[0].simulated_rtf > 0.0);
  const std::string tsv = FormatExperimentTsv(rows);
  CHECK(tsv.rfind("strategy\tbeam\twer\tsub\tdel\tins\tref_words\trtf_wallclock\trtf_simulated\n", 0) == 0);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 2);

  const auto more = MakeCorpus(17, 3);
  ex.strategies = {"lstm-1pass(1)", "lstm-1pass(inf)", "fullsum+cn"};
  ex.beams = {6.0, 10.0};
  const auto first = RunExperiment(ex, more->models, more->manifest, more->Loader());
  const auto second = RunExperiment(ex, more->models, more->manifest, more->Loader());
  REQUIRE(first.size() == 6);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].strategy == second[i].strategy);
    CHECK(first[i].beam == second[i].beam);
    CHECK(first[i].wer == second[i].wer);
    CHECK(first[i].simulated_rtf == second[i].simulated_rtf);
  }
  CHECK(first[0].strategy == "lstm-1pass(1)");
  CHECK(first[1].beam == 10.0);

  ex.strategies = {"nope"};
  CHECK_THROWS_AS(RunExperiment(ex, more->models, more->manifest, more->Loader()), ConfigError);
}

TEST_CASE("two-pass and one-pass experiments agree at exact settings") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto inst = testing::MakeSmallInstance(seed);
    auto& m = inst.models;
    const ModelSet models = MakeModelSet(m.lexicon, m.backoff, m.recurrent, {}, m.topology);
    CorpusManifest manifest;
    Words ref;
    for (const auto& p : inst.plan) ref.push_back(m.lexicon.words[static_cast<std::size_t>(p.word)].word);
    manifest.entries.push_back({inst.emissions.utterance_id(), "", 1.0, ref});
    const EmissionLoader loader = [&](const ManifestEntry&) { return inst.emissions; };
    ExperimentConfig ex;
    ex.strategies = {"lstm-n2+rescore", "lstm-1pass(inf)"};
    ex.base.decode = inst.cfg;
    ex.base.rescore.k = kUnlimitedHistories;
    const auto rows = RunExperiment(ex, models, manifest, loader);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].wer == rows[1].wer);
  }
}

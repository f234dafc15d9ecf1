// src/eval/pipeline.cc

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

#include "rnnsearch/eval/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fmt/format.h>
#include <thread>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/io/arpa.hpp"
#include "rnnsearch/io/emissions.hpp"
#include "rnnsearch/io/rnn_weights.hpp"
#include "rnnsearch/io/vocabulary.hpp"

namespace rnnsearch {

ModelSet MakeModelSet(Lexicon lexicon, std::shared_ptr<const BackoffLm> backoff,
                      std::shared_ptr<const RecurrentLm> recurrent, const InterpolationConfig& interp,
                      const HmmTopology& topology) {
  if (!backoff && !recurrent) throw ConfigError("at least one language model is required");
  topology.Validate();
  ModelSet m;
  m.lexicon = std::move(lexicon);
  m.backoff = std::move(backoff);
  m.recurrent = std::move(recurrent);
  m.vocab = std::make_shared<const Vocabulary>(
      BuildVocabulary(&m.lexicon, m.backoff.get(), m.recurrent.get()));
  m.full = std::make_unique<LmScorer>(m.vocab, m.backoff, m.recurrent, interp);
  if (m.backoff) m.backoff_only = std::make_unique<LmScorer>(m.vocab, m.backoff, nullptr, interp);
  m.tree = BuildPrefixTree(m.lexicon, *m.vocab);
  m.topology = topology;
  return m;
}

ModelSet LoadModelSet(const std::string& lexicon_path, const std::string& arpa_path,
                      const std::string& rnnlm_path, const InterpolationConfig& interp,
                      const HmmTopology& topology) {
  if (lexicon_path.empty()) throw ConfigError("a lexicon is required");
  std::shared_ptr<const BackoffLm> backoff;
  std::shared_ptr<const RecurrentLm> recurrent;
  if (!arpa_path.empty()) backoff = std::make_shared<const BackoffLm>(LoadArpaFile(arpa_path));
  if (!rnnlm_path.empty()) {
    recurrent = std::make_shared<const RecurrentLm>(LoadRnnWeightsFile(rnnlm_path));
  }
  return MakeModelSet(LoadLexiconFile(lexicon_path), backoff, recurrent, interp, topology);
}

std::string Strategy::Name() const {
  switch (kind) {
    case StrategyKind::kBackoff1Pass:
      return "backoff-1pass";
    case StrategyKind::kLstm1Pass:
      return n == kUnlimited ? "lstm-1pass(inf)" : fmt::format("lstm-1pass({})", n);
    case StrategyKind::kBackoffRescore:
      return "backoff+rescore";
    case StrategyKind::kLstmN2Rescore:
      return "lstm-n2+rescore";
    case StrategyKind::kFullsum:
      return "fullsum";
    case StrategyKind::kFullsumCn:
      return "fullsum+cn";
  }
  return "?";
}

int ParseRecombinationLimit(const std::string& text) {
  if (text == "inf" || text == "infinity") return kUnlimited;
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(text, &used);
    if (used != text.size()) throw ConfigError("");
  } catch (const std::exception&) {
    throw ConfigError("recombination limit must be a positive integer or inf, got '" + text + "'");
  }
  if (n < 1) throw ConfigError("recombination limit must be at least 1");
  return n;
}

Strategy ParseStrategy(const std::string& name) {
  Strategy s;
  if (name == "backoff-1pass") {
    s.kind = StrategyKind::kBackoff1Pass;
  } else if (name == "lstm-1pass") {
    s.kind = StrategyKind::kLstm1Pass;
  } else if (name.starts_with("lstm-1pass(") && name.ends_with(")")) {
    s.kind = StrategyKind::kLstm1Pass;
    s.n = ParseRecombinationLimit(name.substr(11, name.size() - 12));
  } else if (name == "backoff+rescore") {
    s.kind = StrategyKind::kBackoffRescore;
  } else if (name == "lstm-n2+rescore") {
    s.kind = StrategyKind::kLstmN2Rescore;
  } else if (name == "fullsum") {
    s.kind = StrategyKind::kFullsum;
  } else if (name == "fullsum+cn") {
    s.kind = StrategyKind::kFullsumCn;
  } else {
    throw ConfigError("unknown strategy '" + name + "'");
  }
  return s;
}

namespace {

int BackoffRecombination(const ModelSet& m) { return std::max(1, m.backoff->order() - 1); }

const LmScorer& RequireBackoff(const ModelSet& m, const Strategy& s) {
  if (!m.backoff_only) throw ConfigError(s.Name() + " needs a backoff LM");
  return *m.backoff_only;
}

void RequireRecurrent(const ModelSet& m, const Strategy& s) {
  if (!m.recurrent) throw ConfigError(s.Name() + " needs a recurrent LM");
}

}  // namespace

UtteranceOutput RunPipeline(const ModelSet& models, const EmissionMatrix& emissions,
                            const PipelineConfig& cfg) {
  const Strategy& s = cfg.strategy;
  DecodeConfig dcfg = cfg.decode;
  RescoreConfig rcfg = cfg.rescore;
  rcfg.scale_am = dcfg.scale_am;
  rcfg.scale_lm = dcfg.scale_lm;
  HmmTopology topology = models.topology;
  const LmScorer* first_pass = models.full.get();
  bool rescore = false;

  switch (s.kind) {
    case StrategyKind::kBackoff1Pass:
      first_pass = &RequireBackoff(models, s);
      dcfg.recombination_n = BackoffRecombination(models);
      break;
    case StrategyKind::kLstm1Pass:
      RequireRecurrent(models, s);
      dcfg.recombination_n = s.n;
      break;
    case StrategyKind::kBackoffRescore:
      RequireRecurrent(models, s);
      first_pass = &RequireBackoff(models, s);
      dcfg.recombination_n = BackoffRecombination(models);
      rescore = true;
      break;
    case StrategyKind::kLstmN2Rescore:
      RequireRecurrent(models, s);
      dcfg.recombination_n = 2;
      rescore = true;
      break;
    case StrategyKind::kFullsum:
    case StrategyKind::kFullsumCn:
      dcfg.mode = SearchMode::kFullsum;
      if (cfg.normalize_topology) topology = NormalizeTopology(topology);
      break;
  }

  UtteranceOutput out;
  out.utterance_id = emissions.utterance_id();
  DecodeResult dec = Decode(emissions, models.tree, *first_pass, topology, dcfg);
  out.words = dec.words;
  out.score = dec.score;
  out.stats = std::move(dec.stats);
  out.simulated_ms = out.stats.SimulatedMs();
  out.lattice = std::move(dec.lattice);

  if (rescore) {
    RescoreResult r = PushForwardRescore(out.lattice, *models.full, rcfg);
    out.words = r.best.words;
    out.score = -r.best.score;
    out.lattice = std::move(r.lattice);
    out.rescore_forwards = r.forwards;
    for (std::size_t b : r.batches) out.simulated_ms += dcfg.cost.BatchMs(b);
  }
  if (s.kind == StrategyKind::kFullsumCn) {
    const auto post =
        ForwardBackward(out.lattice, dcfg.scale_am, dcfg.scale_lm, cfg.posterior_scale);
    out.cn = BuildConfusionNetwork(out.lattice, post, dcfg.scale_am, dcfg.scale_lm);
    out.words = CnDecode(out.cn);
  }
  return out;
}

EmissionMatrix LoadManifestEmissions(const ManifestEntry& entry) {
  return LoadEmissionsFile(entry.emission_path, entry.utterance_id);
}

CorpusResult RunCorpus(const ModelSet& models, const CorpusManifest& manifest,
                       const PipelineConfig& cfg, const EmissionLoader& loader) {
  cfg.decode.Validate();
  if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");
  const std::size_t n = manifest.entries.size();
  CorpusResult result;
  result.utterances.resize(n);

  const auto start = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.jobs));
  auto worker = [&](std::size_t slot) {
    try {
      for (std::size_t i = next++; i < n; i = next++) {
        const ManifestEntry& entry = manifest.entries[i];
        UtteranceResult& r = result.utterances[i];
        EmissionMatrix em = loader(entry);
        if (em.utterance_id().empty()) em.set_utterance_id(entry.utterance_id);
        r.output = RunPipeline(models, em, cfg);
        r.reference = entry.reference;
        if (cfg.score) r.wer = Wer(r.reference, r.output.words);
      }
    } catch (...) {
      errors[slot] = std::current_exception();
    }
  };
  if (cfg.jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < cfg.jobs; ++j) pool.emplace_back(worker, static_cast<std::size_t>(j));
    for (auto& t : pool) t.join();
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (const auto& u : result.utterances) {
    result.wer += u.wer;
    result.simulated_ms += u.output.simulated_ms;
  }
  result.rtf = Rtf(wall, manifest);
  result.simulated_rtf = result.simulated_ms / 1000.0 / result.rtf.audio_s;
  return result;
}

GridResult GridSearch(const std::vector<std::pair<double, double>>& pairs, const ModelSet& models,
                      const CorpusManifest& manifest, const PipelineConfig& cfg,
                      const EmissionLoader& loader) {
  if (pairs.empty()) throw ConfigError("grid search needs at least one scale pair");
  GridResult out;
  for (const auto& [am, lm] : pairs) {
    PipelineConfig c = cfg;
    c.decode.scale_am = am;
    c.decode.scale_lm = lm;
    GridPoint p{am, lm, RunCorpus(models, manifest, c, loader).wer};
    out.points.push_back(p);
  }
  const GridPoint* best = &out.points.front();
  for (const auto& p : out.points) {
    const std::size_t e = p.wer.Errors();
    const std::size_t be = best->wer.Errors();
    if (e != be ? e < be
                : (p.scale_lm != best->scale_lm ? p.scale_lm < best->scale_lm
                                                : p.scale_am < best->scale_am)) {
      best = &p;
    }
  }
  out.best = *best;
  return out;
}

std::vector<ExperimentRow> RunExperiment(const ExperimentConfig& cfg, const ModelSet& models,
                                         const CorpusManifest& manifest,
                                         const EmissionLoader& loader) {
  std::vector<Strategy> strategies;
  for (const auto& name : cfg.strategies) strategies.push_back(ParseStrategy(name));
  std::vector<double> beams = cfg.beams;
  if (beams.empty()) beams.push_back(cfg.base.decode.beam);

  std::vector<ExperimentRow> rows;
  for (const auto& s : strategies) {
    for (double beam : beams) {
      PipelineConfig c = cfg.base;
      c.strategy = s;
      c.decode.beam = beam;
      const CorpusResult r = RunCorpus(models, manifest, c, loader);
      rows.push_back(ExperimentRow{s.Name(), beam, r.wer, r.rtf.rtf, r.simulated_rtf});
    }
  }
  return rows;
}

std::string FormatExperimentTsv(const std::vector<ExperimentRow>& rows) {
  std::string out = "strategy\tbeam\twer\tsub\tdel\tins\tref_words\trtf_wallclock\trtf_simulated\n";
  for (const auto& r : rows) {
    out += fmt::format("{}\t{}\t{:.4f}\t{}\t{}\t{}\t{}\t{:.6f}\t{:.6f}\n", r.strategy, r.beam,
                       r.wer.Wer(), r.wer.substitutions, r.wer.deletions, r.wer.insertions,
                       r.wer.reference_length, r.wallclock_rtf, r.simulated_rtf);
  }
  return out;
}

}  // namespace rnnsearch

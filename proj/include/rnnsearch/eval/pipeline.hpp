// include/rnnsearch/eval/pipeline.hpp

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

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rnnsearch/decoder/decoder.hpp"
#include "rnnsearch/eval/metrics.hpp"
#include "rnnsearch/io/lexicon.hpp"
#include "rnnsearch/io/manifest.hpp"
#include "rnnsearch/lattice/lattice_ops.hpp"
#include "rnnsearch/lm/backoff_lm.hpp"
#include "rnnsearch/lm/recurrent_lm.hpp"

namespace rnnsearch {

/// Everything a recognition pipeline reads. Immutable once built; shareable across
/// threads.
struct ModelSet {
  Lexicon lexicon;
  std::shared_ptr<const Vocabulary> vocab;
  std::shared_ptr<const BackoffLm> backoff;
  std::shared_ptr<const RecurrentLm> recurrent;
  /// Interpolated when both models exist, otherwise the single model.
  std::unique_ptr<LmScorer> full;
  /// Backoff model alone; null without a backoff model.
  std::unique_ptr<LmScorer> backoff_only;
  PrefixTree tree;
  HmmTopology topology;
};

ModelSet MakeModelSet(Lexicon lexicon, std::shared_ptr<const BackoffLm> backoff,
                      std::shared_ptr<const RecurrentLm> recurrent, const InterpolationConfig& interp,
                      const HmmTopology& topology);

/// Loads the files; empty paths skip that model. At least one LM is required.
ModelSet LoadModelSet(const std::string& lexicon_path, const std::string& arpa_path,
                      const std::string& rnnlm_path, const InterpolationConfig& interp,
                      const HmmTopology& topology);

enum class StrategyKind {
  kBackoff1Pass,
  kLstm1Pass,
  kBackoffRescore,
  kLstmN2Rescore,
  kFullsum,
  kFullsumCn,
};

struct Strategy {
  StrategyKind kind = StrategyKind::kLstm1Pass;
  /// Recombination limit for lstm-1pass(n).
  int n = kUnlimited;
  std::string Name() const;
};

/// Accepts backoff-1pass, lstm-1pass, lstm-1pass(<n>|inf), backoff+rescore,
/// lstm-n2+rescore, fullsum, fullsum+cn. Throws ConfigError otherwise.
Strategy ParseStrategy(const std::string& name);

/// Parses a positive integer or inf.
int ParseRecombinationLimit(const std::string& text);

struct PipelineConfig {
  Strategy strategy;
  DecodeConfig decode;
  RescoreConfig rescore;
  double posterior_scale = 1.0;
  /// Full-sum strategies turn the penalties into normalized transition probabilities.
  bool normalize_topology = true;
  int jobs = 1;
  /// Score hypotheses against the manifest references. Off for unlabeled corpora.
  bool score = true;
};

struct UtteranceOutput {
  std::string utterance_id;
  std::vector<std::string> words;
  double score = 0.0;
  /// Final lattice (rescored where the strategy rescores).
  Lattice lattice;
  DecodeStats stats;
  std::size_t rescore_forwards = 0;
  double simulated_ms = 0.0;
  /// Filled by fullsum+cn.
  ConfusionNetwork cn;
};

UtteranceOutput RunPipeline(const ModelSet& models, const EmissionMatrix& emissions,
                            const PipelineConfig& cfg);

struct UtteranceResult {
  UtteranceOutput output;
  std::vector<std::string> reference;
  WerCounts wer;
};

struct CorpusResult {
  std::vector<UtteranceResult> utterances;
  WerCounts wer;
  RtfReport rtf;
  double simulated_ms = 0.0;
  double simulated_rtf = 0.0;
};

using EmissionLoader = std::function<EmissionMatrix(const ManifestEntry&)>;

/// Reads emissions from entry.emission_path.
EmissionMatrix LoadManifestEmissions(const ManifestEntry& entry);

/// Decodes every manifest entry (with cfg.jobs threads) and scores against the
/// references. Wallclock covers emission loading and recognition, not model loading.
CorpusResult RunCorpus(const ModelSet& models, const CorpusManifest& manifest,
                       const PipelineConfig& cfg, const EmissionLoader& loader = LoadManifestEmissions);

struct GridPoint {
  double scale_am = 1.0;
  double scale_lm = 1.0;
  WerCounts wer;
};

struct GridResult {
  GridPoint best;
  std::vector<GridPoint> points;
};

/// Runs the pipeline per (scale_am, scale_lm) pair and returns the lowest corpus
/// WER, ties broken by lower scale_lm and then lower scale_am.
GridResult GridSearch(const std::vector<std::pair<double, double>>& pairs, const ModelSet& models,
                      const CorpusManifest& manifest, const PipelineConfig& cfg,
                      const EmissionLoader& loader = LoadManifestEmissions);

struct ExperimentConfig {
  std::vector<std::string> strategies;
  std::vector<double> beams;
  PipelineConfig base;
};

struct ExperimentRow {
  std::string strategy;
  double beam = 0.0;
  WerCounts wer;
  double wallclock_rtf = 0.0;
  double simulated_rtf = 0.0;
};

std::vector<ExperimentRow> RunExperiment(const ExperimentConfig& cfg, const ModelSet& models,
                                         const CorpusManifest& manifest,
                                         const EmissionLoader& loader = LoadManifestEmissions);

/// Header line plus one line per row: strategy, beam, WER, S, D, I, N, RTFs.
std::string FormatExperimentTsv(const std::vector<ExperimentRow>& rows);

}  // namespace rnnsearch

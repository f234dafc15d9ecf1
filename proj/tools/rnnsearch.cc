// tools/rnnsearch.cc

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

// Command-line front end: decoding, rescoring, evaluation and experiment sweeps.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "rnnsearch/errors.hpp"
#include "rnnsearch/eval/pipeline.hpp"
#include "rnnsearch/io/lattice.hpp"
#include "rnnsearch/io/text_reader.hpp"
#include "rnnsearch/io/vocabulary.hpp"
#include "rnnsearch/lm/perplexity.hpp"
#include "rnnsearch/synth/synth.hpp"

namespace {

using namespace rnnsearch;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct Options {
  std::string lexicon;
  std::string arpa;
  std::string rnnlm;
  std::string manifest;
  std::string out;
  std::string strategy = "lstm-1pass";
  std::string mode = "viterbi";
  std::string recomb_n = "inf";
  double beam = kInf;
  std::size_t max_hyps = 0;
  double scale_am = 1.0;
  double scale_lm = 1.0;
  double lambda_backoff = 0.5;
  double lambda_recurrent = 0.5;
  bool renormalize = false;
  std::size_t k = 16;
  double rescore_beam = kInf;
  double posterior_scale = 1.0;
  int jobs = 1;
  std::size_t batch_size = 32;
  bool no_lookahead = false;
  double latency_ms = 3.3;
  double per_item_ms = 0.2;
  double loop_penalty = 0.0;
  double forward_penalty = 0.0;
  double skip_penalty = 0.0;
  bool skip = false;
  bool keep_topology = false;
  std::string lattice_dir;
  std::string cn_dir;
};

void AddCommon(CLI::App* app, Options* o) {
  app->add_option("--lexicon", o->lexicon, "Lexicon file");
  app->add_option("--arpa", o->arpa, "Backoff LM in ARPA format");
  app->add_option("--rnnlm", o->rnnlm, "Recurrent LM weights");
  app->add_option("--manifest", o->manifest, "Corpus manifest");
  app->add_option("--out", o->out, "Output file (default stdout)");
  app->add_option("--beam", o->beam, "Search beam (negative log domain)");
  app->add_option("--max-hyps", o->max_hyps, "Histogram pruning cap, 0 for none");
  app->add_option("--recomb-n", o->recomb_n, "Word-end recombination limit (integer or inf)");
  app->add_option("--mode", o->mode, "viterbi or fullsum");
  app->add_option("--scale-am", o->scale_am, "Acoustic scale");
  app->add_option("--scale-lm", o->scale_lm, "LM scale");
  app->add_option("--lambda-backoff", o->lambda_backoff, "Interpolation weight of the backoff LM");
  app->add_option("--lambda-recurrent", o->lambda_recurrent,
                  "Interpolation weight of the recurrent LM");
  app->add_flag("--renormalize", o->renormalize, "Renormalize interpolated scores");
  app->add_option("--k", o->k, "Histories kept per lattice node when rescoring");
  app->add_option("--rescore-beam", o->rescore_beam, "Rescoring beam");
  app->add_option("--posterior-scale", o->posterior_scale, "Posterior scale for confusion networks");
  app->add_option("--jobs", o->jobs, "Utterances decoded in parallel");
  app->add_option("--batch-size", o->batch_size, "Recurrent LM batch capacity");
  app->add_flag("--no-lookahead", o->no_lookahead, "Disable LM lookahead");
  app->add_option("--batch-latency-ms", o->latency_ms, "Cost model latency per batch");
  app->add_option("--batch-per-item-ms", o->per_item_ms, "Cost model cost per history");
  app->add_option("--loop-penalty", o->loop_penalty, "HMM loop penalty");
  app->add_option("--forward-penalty", o->forward_penalty, "HMM forward penalty");
  app->add_option("--skip-penalty", o->skip_penalty, "HMM skip penalty");
  app->add_flag("--skip", o->skip, "Allow skip transitions");
  app->add_flag("--keep-topology", o->keep_topology,
                "Do not normalize the topology for full-sum decoding");
}

HmmTopology MakeTopology(const Options& o) {
  HmmTopology t;
  t.loop_penalty = o.loop_penalty;
  t.forward_penalty = o.forward_penalty;
  t.skip_penalty = o.skip_penalty;
  t.skip_allowed = o.skip;
  return t;
}

ModelSet LoadModels(const Options& o) {
  InterpolationConfig interp{o.lambda_backoff, o.lambda_recurrent, o.renormalize};
  return LoadModelSet(o.lexicon, o.arpa, o.rnnlm, interp, MakeTopology(o));
}

PipelineConfig MakePipelineConfig(const Options& o) {
  PipelineConfig c;
  c.strategy = ParseStrategy(o.strategy);
  c.decode.beam = o.beam;
  c.decode.max_hyps = o.max_hyps;
  c.decode.recombination_n = ParseRecombinationLimit(o.recomb_n);
  c.decode.mode = ParseSearchMode(o.mode);
  c.decode.scale_am = o.scale_am;
  c.decode.scale_lm = o.scale_lm;
  c.decode.lookahead = !o.no_lookahead;
  c.decode.batch_size = o.batch_size;
  c.decode.cost.latency_ms = o.latency_ms;
  c.decode.cost.per_item_ms = o.per_item_ms;
  c.rescore.k = o.k;
  c.rescore.beam = o.rescore_beam;
  c.rescore.scale_am = o.scale_am;
  c.rescore.scale_lm = o.scale_lm;
  c.posterior_scale = o.posterior_scale;
  c.normalize_topology = !o.keep_topology;
  c.jobs = o.jobs;
  c.decode.Validate();
  c.rescore.Validate();
  return c;
}

CorpusManifest RequireManifest(const Options& o) {
  if (o.manifest.empty()) throw ConfigError("--manifest is required");
  return LoadManifestFile(o.manifest);
}

bool AllLabeled(const CorpusManifest& m) {
  for (const auto& e : m.entries) {
    if (e.reference.empty()) return false;
  }
  return true;
}

void Emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    WriteFile(o.out, text);
  }
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> values;
  for (const auto& item : SplitWords(text)) {
    double v = 0.0;
    if (!ParseDouble(item, &v)) throw ConfigError("not a number: '" + item + "'");
    values.push_back(v);
  }
  return values;
}

/// Whitespace-split tokens of every nonblank line.
std::vector<std::vector<std::string>> ReadTokenLines(const std::string& path) {
  const std::string text = ReadFile(path);
  TextReader reader(text);
  std::vector<std::vector<std::string>> lines;
  std::string_view line;
  while (reader.NextNonBlank(&line)) lines.push_back(SplitWords(line));
  return lines;
}

std::string CommaToSpace(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  return s;
}

void ReportCorpus(const CorpusResult& r, bool scored) {
  if (scored) {
    std::cerr << fmt::format("WER {:.2f}% [ {} / {}, {} sub, {} del, {} ins ]\n", 100.0 * r.wer.Wer(),
                             r.wer.Errors(), r.wer.reference_length, r.wer.substitutions,
                             r.wer.deletions, r.wer.insertions);
  }
  std::cerr << fmt::format("RTF {:.6f} (wallclock {:.3f} s, audio {:.3f} s), simulated RTF {:.6f}\n",
                           r.rtf.rtf, r.rtf.wallclock_s, r.rtf.audio_s, r.simulated_rtf);
}

std::string Hypotheses(const CorpusResult& r) {
  std::string text;
  for (const auto& u : r.utterances) {
    text += u.output.utterance_id;
    if (!u.output.words.empty()) text += " " + JoinWords(u.output.words);
    text += "\n";
  }
  return text;
}

void WriteLattices(const CorpusResult& r, const std::string& dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  for (const auto& u : r.utterances) {
    WriteFile(dir + "/" + u.output.utterance_id + ".lat", WriteLattice(u.output.lattice));
  }
}

void WriteNetworks(const CorpusResult& r, const std::string& dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  for (const auto& u : r.utterances) {
    WriteFile(dir + "/" + u.output.utterance_id + ".cn", WriteConfusionNetwork(u.output.cn));
  }
}

int RunDecode(const Options& o, bool fullsum) {
  const ModelSet models = LoadModels(o);
  const CorpusManifest manifest = RequireManifest(o);
  PipelineConfig cfg = MakePipelineConfig(o);
  if (fullsum) {
    cfg.strategy.kind = o.cn_dir.empty() && o.strategy != "fullsum+cn" ? StrategyKind::kFullsum
                                                                       : StrategyKind::kFullsumCn;
  } else if (cfg.strategy.kind == StrategyKind::kLstm1Pass) {
    cfg.strategy.n = cfg.decode.recombination_n;
  }
  cfg.score = AllLabeled(manifest);
  const CorpusResult r = RunCorpus(models, manifest, cfg);
  Emit(o, Hypotheses(r));
  WriteLattices(r, o.lattice_dir);
  if (fullsum) WriteNetworks(r, o.cn_dir);
  ReportCorpus(r, cfg.score);
  return 0;
}

int RunRescore(const Options& o) {
  if (o.lattice_dir.empty()) throw ConfigError("--lattices is required");
  const ModelSet models = LoadModels(o);
  const CorpusManifest manifest = RequireManifest(o);
  const PipelineConfig cfg = MakePipelineConfig(o);
  const bool scored = AllLabeled(manifest);

  CorpusResult r;
  double simulated_ms = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& entry : manifest.entries) {
    const Lattice lat = ReadLatticeFile(o.lattice_dir + "/" + entry.utterance_id + ".lat");
    const RescoreResult res = PushForwardRescore(lat, *models.full, cfg.rescore);
    UtteranceResult u;
    u.output.utterance_id = entry.utterance_id;
    u.output.words = res.best.words;
    u.output.score = -res.best.score;
    u.output.lattice = res.lattice;
    u.output.rescore_forwards = res.forwards;
    for (std::size_t b : res.batches) simulated_ms += cfg.decode.cost.BatchMs(b);
    u.reference = entry.reference;
    if (scored) r.wer += u.wer = Wer(u.reference, u.output.words);
    r.utterances.push_back(std::move(u));
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.rtf = Rtf(wall, manifest);
  r.simulated_ms = simulated_ms;
  r.simulated_rtf = simulated_ms / 1000.0 / r.rtf.audio_s;
  Emit(o, Hypotheses(r));
  WriteLattices(r, o.cn_dir);
  ReportCorpus(r, scored);
  return 0;
}

int RunEvaluate(const Options& o, const std::string& hyp_path) {
  const CorpusManifest manifest = RequireManifest(o);
  CorpusResult r;
  if (hyp_path.empty()) {
    const ModelSet models = LoadModels(o);
    r = RunCorpus(models, manifest, MakePipelineConfig(o));
  } else {
    std::unordered_map<std::string, std::vector<std::string>> hyps;
    for (auto& words : ReadTokenLines(hyp_path)) {
      const std::string id = words.front();
      words.erase(words.begin());
      hyps[id] = std::move(words);
    }
    for (const auto& e : manifest.entries) {
      const auto it = hyps.find(e.utterance_id);
      if (it == hyps.end()) throw DataError("no hypothesis for utterance " + e.utterance_id);
      r.wer += Wer(e.reference, it->second);
    }
    r.rtf.audio_s = manifest.TotalDuration();
  }
  std::string text = fmt::format("wer\t{:.6f}\nsub\t{}\ndel\t{}\nins\t{}\nref_words\t{}\n",
                                 r.wer.Wer(), r.wer.substitutions, r.wer.deletions,
                                 r.wer.insertions, r.wer.reference_length);
  if (hyp_path.empty()) {
    text += fmt::format("rtf_wallclock\t{:.6f}\nrtf_simulated\t{:.6f}\n", r.rtf.rtf, r.simulated_rtf);
  }
  Emit(o, text);
  return 0;
}

int RunPpl(const Options& o, const std::string& text_path) {
  if (text_path.empty()) throw ConfigError("--text is required");
  const ModelSet models = LoadModels(o);
  const PerplexityResult p = Perplexity(*models.full, ReadTokenLines(text_path));
  Emit(o, fmt::format("perplexity\t{:.6f}\nlog_prob\t{:.6f}\ntokens\t{}\noov\t{}\n", p.perplexity,
                      p.log_prob, p.tokens, p.oov));
  return 0;
}

int RunBenchBatch(const Options& o, const std::string& sizes_text) {
  CostModel model{o.latency_ms, o.per_item_ms};
  model.Validate();
  std::vector<std::size_t> sizes;
  for (double v : ParseList(CommaToSpace(sizes_text))) {
    if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw ConfigError("batch sizes must be positive integers");
    }
    sizes.push_back(static_cast<std::size_t>(v));
  }
  const auto costs = SimulateCost(model, sizes);
  std::string text = "batch_size\tms_per_history\n";
  for (std::size_t i = 0; i < sizes.size(); ++i) text += fmt::format("{}\t{:.6f}\n", sizes[i], costs[i]);
  Emit(o, text);
  return 0;
}

int RunGridSearch(const Options& o, const std::string& am_grid, const std::string& lm_grid) {
  const ModelSet models = LoadModels(o);
  const CorpusManifest manifest = RequireManifest(o);
  std::vector<std::pair<double, double>> pairs;
  for (double am : ParseList(CommaToSpace(am_grid))) {
    for (double lm : ParseList(CommaToSpace(lm_grid))) pairs.emplace_back(am, lm);
  }
  const GridResult g = GridSearch(pairs, models, manifest, MakePipelineConfig(o));
  std::string text = "scale_am\tscale_lm\twer\terrors\tref_words\n";
  for (const auto& p : g.points) {
    text += fmt::format("{}\t{}\t{:.6f}\t{}\t{}\n", p.scale_am, p.scale_lm, p.wer.Wer(), p.wer.Errors(),
                        p.wer.reference_length);
  }
  Emit(o, text);
  std::cerr << fmt::format("best scale_am {} scale_lm {} WER {:.2f}%\n", g.best.scale_am,
                           g.best.scale_lm, 100.0 * g.best.wer.Wer());
  return 0;
}

int RunExperimentCommand(const Options& o, const std::vector<std::string>& strategies,
                         const std::string& beams) {
  const ModelSet models = LoadModels(o);
  const CorpusManifest manifest = RequireManifest(o);
  ExperimentConfig cfg;
  cfg.strategies = strategies;
  cfg.beams = ParseList(CommaToSpace(beams));
  cfg.base = MakePipelineConfig(o);
  if (cfg.strategies.empty()) throw ConfigError("--strategies is required");
  Emit(o, FormatExperimentTsv(RunExperiment(cfg, models, manifest)));
  return 0;
}

int RunSynth(const std::string& dir, std::uint64_t seed, const synth::CorpusSpec& spec) {
  if (dir.empty()) throw ConfigError("--dir is required");
  std::filesystem::create_directories(dir);
  synth::Rng rng(seed);
  synth::WriteSynthCorpus(synth::MakeSynthCorpus(rng, spec), dir);
  return 0;
}

/// key=value config whose unsectioned keys belong to the invoked subcommand.
class SubcommandConfig : public CLI::ConfigBase {
 public:
  std::string subcommand;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigBase::from_config(input);
    if (subcommand.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty()) item.parents = {subcommand};
    }
    return items;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rnnsearch: one-pass and two-pass decoding with recurrent LM histories"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  std::string hyp_path;
  std::string text_path;
  std::string sizes = "1,2,4,8,16,32,64,128";
  std::string am_grid = "1";
  std::string lm_grid = "0.5,1,2";
  std::vector<std::string> strategies;
  std::string beams;
  std::string synth_dir;
  std::uint64_t seed = 1;
  synth::CorpusSpec spec;

  auto* decode = app.add_subcommand("decode", "One-pass decoding of a manifest");
  decode->add_option("--strategy", o.strategy, "Strategy name");
  decode->add_option("--lattices", o.lattice_dir, "Directory for output lattices");
  auto* rescore = app.add_subcommand("rescore", "Push-forward rescoring of lattices");
  rescore->add_option("--lattices", o.lattice_dir, "Directory with <utt>.lat input lattices");
  rescore->add_option("--out-lattices", o.cn_dir, "Directory for rescored lattices");
  auto* fullsum = app.add_subcommand("fullsum", "Full-sum decoding, optionally with confusion networks");
  fullsum->add_option("--lattices", o.lattice_dir, "Directory for output lattices");
  fullsum->add_option("--cn", o.cn_dir, "Directory for confusion networks (enables CN decoding)");
  auto* evaluate = app.add_subcommand("evaluate", "WER and RTF of a strategy or a hypothesis file");
  evaluate->add_option("--strategy", o.strategy, "Strategy name");
  evaluate->add_option("--hyp", hyp_path, "Score this hypothesis file instead of decoding");
  auto* ppl = app.add_subcommand("ppl", "Perplexity of a text file, one sentence per line");
  ppl->add_option("--text", text_path, "Text file");
  auto* bench = app.add_subcommand("bench-batch", "Simulated per-history cost per batch size");
  bench->add_option("--sizes", sizes, "Comma-separated batch sizes");
  auto* grid = app.add_subcommand("grid-search", "Scale grid search by corpus WER");
  grid->add_option("--strategy", o.strategy, "Strategy name");
  grid->add_option("--scale-am-grid", am_grid, "Comma-separated acoustic scales");
  grid->add_option("--scale-lm-grid", lm_grid, "Comma-separated LM scales");
  auto* experiment = app.add_subcommand("run-experiment", "WER/RTF rows per strategy and beam");
  experiment->add_option("--strategies", strategies, "Strategy names")->delimiter(',');
  experiment->add_option("--beams", beams, "Comma-separated beams");
  auto* synth_cmd = app.add_subcommand("synth", "Write a random synthetic corpus");
  synth_cmd->add_option("--dir", synth_dir, "Output directory");
  synth_cmd->add_option("--seed", seed, "Random seed");
  synth_cmd->add_option("--utterances", spec.utterances, "Number of utterances");
  synth_cmd->add_option("--words", spec.lexicon.words, "Lexicon size");

  for (auto* sub : {decode, rescore, fullsum, evaluate, ppl, bench, grid, experiment}) {
    AddCommon(sub, &o);
    sub->allow_config_extras(CLI::config_extras_mode::error);
  }
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.set_config("--config", "", "Configuration file of key=value lines; flags take precedence");
  auto config = std::make_shared<SubcommandConfig>();
  for (int i = 1; i < argc && config->subcommand.empty(); ++i) {
    for (const auto* sub : app.get_subcommands({})) {
      if (sub->get_name() == argv[i]) config->subcommand = argv[i];
    }
  }
  app.config_formatter(config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*decode) return RunDecode(o, false);
    if (*rescore) return RunRescore(o);
    if (*fullsum) return RunDecode(o, true);
    if (*evaluate) return RunEvaluate(o, hyp_path);
    if (*ppl) return RunPpl(o, text_path);
    if (*bench) return RunBenchBatch(o, sizes);
    if (*grid) return RunGridSearch(o, am_grid, lm_grid);
    if (*experiment) return RunExperimentCommand(o, strategies, beams);
    if (*synth_cmd) return RunSynth(synth_dir, seed, spec);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

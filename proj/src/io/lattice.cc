// src/io/lattice.cc

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

#include "rnnsearch/io/lattice.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/io/text_reader.hpp"
#include "rnnsearch/io/vocabulary.hpp"

namespace rnnsearch {

int Lattice::FinalFrame() const {
  int hi = 0;
  for (const auto& n : nodes) hi = std::max(hi, n.frame);
  return hi;
}

std::vector<int> Lattice::FinalNodes() const {
  std::vector<int> out;
  int last = FinalFrame();
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    if (nodes[static_cast<std::size_t>(i)].frame == last) out.push_back(i);
  }
  return out;
}

std::vector<int> Lattice::TopologicalOrder() const {
  std::vector<int> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return nodes[static_cast<std::size_t>(a)].frame < nodes[static_cast<std::size_t>(b)].frame;
  });
  return order;
}

std::vector<std::vector<int>> Lattice::OutgoingArcs() const {
  std::vector<std::vector<int>> out(nodes.size());
  for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
    out[static_cast<std::size_t>(arcs[static_cast<std::size_t>(a)].start)].push_back(a);
  }
  return out;
}

std::vector<std::vector<int>> Lattice::IncomingArcs() const {
  std::vector<std::vector<int>> in(nodes.size());
  for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
    in[static_cast<std::size_t>(arcs[static_cast<std::size_t>(a)].end)].push_back(a);
  }
  return in;
}

namespace {

// Marks nodes reachable from the initial node and nodes that reach a final node.
void Reachability(const Lattice& lat, std::vector<char>* fwd, std::vector<char>* bwd) {
  auto order = lat.TopologicalOrder();
  auto out = lat.OutgoingArcs();
  fwd->assign(lat.nodes.size(), 0);
  bwd->assign(lat.nodes.size(), 0);
  if (lat.nodes.empty()) return;
  (*fwd)[0] = 1;
  for (int u : order) {
    if (!(*fwd)[static_cast<std::size_t>(u)]) continue;
    for (int a : out[static_cast<std::size_t>(u)]) {
      (*fwd)[static_cast<std::size_t>(lat.arcs[static_cast<std::size_t>(a)].end)] = 1;
    }
  }
  for (int f : lat.FinalNodes()) (*bwd)[static_cast<std::size_t>(f)] = 1;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (int a : out[static_cast<std::size_t>(*it)]) {
      if ((*bwd)[static_cast<std::size_t>(lat.arcs[static_cast<std::size_t>(a)].end)]) {
        (*bwd)[static_cast<std::size_t>(*it)] = 1;
      }
    }
  }
}

}  // namespace

void Lattice::Validate() const {
  if (nodes.empty()) throw DataError("lattice has no nodes");
  if (nodes[0].frame != 0) throw DataError("initial node must be at frame 0");
  const int n = static_cast<int>(nodes.size());
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const auto& arc = arcs[a];
    if (arc.start < 0 || arc.start >= n || arc.end < 0 || arc.end >= n) {
      throw DataError(fmt::format("arc {} references a node outside 0..{}", a, n - 1));
    }
    if (nodes[static_cast<std::size_t>(arc.end)].frame <=
        nodes[static_cast<std::size_t>(arc.start)].frame) {
      throw DataError(fmt::format("arc {} does not advance in time", a));
    }
  }
  std::vector<char> fwd, bwd;
  Reachability(*this, &fwd, &bwd);
  for (int i = 0; i < n; ++i) {
    if (!fwd[static_cast<std::size_t>(i)]) throw DataError(fmt::format("node {} is unreachable", i));
    if (!bwd[static_cast<std::size_t>(i)]) throw DataError(fmt::format("node {} is a dead end", i));
  }
}

void Lattice::Trim() {
  if (nodes.empty()) return;
  std::vector<char> fwd, bwd;
  Reachability(*this, &fwd, &bwd);
  std::vector<int> remap(nodes.size(), -1);
  std::vector<LatticeNode> kept;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (fwd[i] && bwd[i]) {
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(std::move(nodes[i]));
    }
  }
  std::vector<LatticeArc> kept_arcs;
  for (auto& arc : arcs) {
    int s = remap[static_cast<std::size_t>(arc.start)];
    int e = remap[static_cast<std::size_t>(arc.end)];
    if (s < 0 || e < 0) continue;
    arc.start = s;
    arc.end = e;
    kept_arcs.push_back(std::move(arc));
  }
  nodes = std::move(kept);
  arcs = std::move(kept_arcs);
}

double Lattice::CountPaths() const {
  if (nodes.empty()) return 0.0;
  std::vector<double> count(nodes.size(), 0.0);
  count[0] = 1.0;
  auto out = OutgoingArcs();
  for (int u : TopologicalOrder()) {
    for (int a : out[static_cast<std::size_t>(u)]) {
      count[static_cast<std::size_t>(arcs[static_cast<std::size_t>(a)].end)] +=
          count[static_cast<std::size_t>(u)];
    }
  }
  double total = 0.0;
  for (int f : FinalNodes()) total += count[static_cast<std::size_t>(f)];
  return total;
}

std::string WriteLattice(const Lattice& lattice) {
  std::string out = fmt::format("VERSION=1 UTTERANCE={} N={} L={}\n",
                                lattice.utterance_id.empty() ? "-" : lattice.utterance_id,
                                lattice.nodes.size(), lattice.arcs.size());
  for (std::size_t i = 0; i < lattice.nodes.size(); ++i) {
    out += fmt::format("I={} t={}\n", i, lattice.nodes[i].frame);
  }
  for (std::size_t j = 0; j < lattice.arcs.size(); ++j) {
    const auto& a = lattice.arcs[j];
    out += fmt::format("J={} S={} E={} W={} v={} a={:.6f} l={:.6f}\n", j, a.start, a.end, a.word,
                       a.variant, a.am, a.lm);
  }
  return out;
}

namespace {

// Splits `K=V` fields of one line; fails on fields without '='.
std::vector<std::pair<std::string, std::string>> Fields(const TextReader& in,
                                                        std::string_view line) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& tok : SplitWords(line)) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) in.Fail("malformed field '" + tok + "'");
    out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return out;
}

const std::string& Get(const TextReader& in,
                       const std::vector<std::pair<std::string, std::string>>& fields,
                       std::string_view key) {
  for (const auto& [k, v] : fields) {
    if (k == key) return v;
  }
  in.Fail("missing field " + std::string(key));
}

int GetInt(const TextReader& in, const std::vector<std::pair<std::string, std::string>>& f,
           std::string_view key) {
  int v = 0;
  const auto& s = Get(in, f, key);
  if (!ParseInt(std::string_view(s), &v)) in.Fail("bad integer for " + std::string(key));
  return v;
}

double GetDouble(const TextReader& in, const std::vector<std::pair<std::string, std::string>>& f,
                 std::string_view key) {
  double v = 0.0;
  if (!ParseDouble(Get(in, f, key), &v)) in.Fail("bad number for " + std::string(key));
  return v;
}

}  // namespace

Lattice ReadLattice(std::string_view text) {
  TextReader in(text);
  std::string_view line;
  if (!in.NextNonBlank(&line)) in.Fail("empty lattice");
  auto header = Fields(in, line);
  if (Get(in, header, "VERSION") != "1") in.Fail("unsupported lattice version");
  Lattice lat;
  lat.utterance_id = Get(in, header, "UTTERANCE");
  if (lat.utterance_id == "-") lat.utterance_id.clear();
  int n = GetInt(in, header, "N");
  int l = GetInt(in, header, "L");
  if (n < 1 || l < 0) in.Fail("bad node/link counts");
  lat.nodes.resize(static_cast<std::size_t>(n));
  std::vector<char> seen_node(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < n; ++k) {
    if (!in.NextNonBlank(&line)) in.Fail("missing node lines");
    auto f = Fields(in, line);
    int i = GetInt(in, f, "I");
    if (i < 0 || i >= n || seen_node[static_cast<std::size_t>(i)]) in.Fail("bad node index");
    seen_node[static_cast<std::size_t>(i)] = 1;
    lat.nodes[static_cast<std::size_t>(i)].frame = GetInt(in, f, "t");
  }
  lat.arcs.resize(static_cast<std::size_t>(l));
  std::vector<char> seen_arc(static_cast<std::size_t>(l), 0);
  for (int k = 0; k < l; ++k) {
    if (!in.NextNonBlank(&line)) in.Fail("missing link lines");
    auto f = Fields(in, line);
    int j = GetInt(in, f, "J");
    if (j < 0 || j >= l || seen_arc[static_cast<std::size_t>(j)]) in.Fail("bad link index");
    seen_arc[static_cast<std::size_t>(j)] = 1;
    LatticeArc& arc = lat.arcs[static_cast<std::size_t>(j)];
    arc.start = GetInt(in, f, "S");
    arc.end = GetInt(in, f, "E");
    if (arc.start < 0 || arc.start >= n || arc.end < 0 || arc.end >= n) {
      in.Fail(fmt::format("link {} references node outside 0..{}", j, n - 1));
    }
    if (lat.nodes[static_cast<std::size_t>(arc.end)].frame <=
        lat.nodes[static_cast<std::size_t>(arc.start)].frame) {
      in.Fail(fmt::format("link {} end time is not after its start time", j));
    }
    arc.word = Get(in, f, "W");
    arc.variant = GetInt(in, f, "v");
    arc.am = GetDouble(in, f, "a");
    arc.lm = GetDouble(in, f, "l");
  }
  if (in.NextNonBlank(&line)) in.Fail("trailing data after links");
  lat.Validate();
  return lat;
}

Lattice ReadLatticeFile(const std::string& path) { return ReadLattice(ReadFile(path)); }

}  // namespace rnnsearch

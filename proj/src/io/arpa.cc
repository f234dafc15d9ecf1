// src/io/arpa.cc

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

#include "rnnsearch/io/arpa.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "rnnsearch/errors.hpp"
#include "rnnsearch/io/text_reader.hpp"

namespace rnnsearch {

const NgramEntry* BackoffLmData::Find(std::span<const WordId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order) return nullptr;
  const auto& table = tables[ngram.size() - 1];
  auto it = table.find(std::vector<WordId>(ngram.begin(), ngram.end()));
  return it == table.end() ? nullptr : &it->second;
}

double BackoffLmData::Log10Prob(std::span<const WordId> context, WordId word) const {
  std::size_t ctx_len = std::min<std::size_t>(context.size(), static_cast<std::size_t>(order - 1));
  std::vector<WordId> key(context.end() - static_cast<std::ptrdiff_t>(ctx_len), context.end());
  double backoff = 0.0;
  for (;;) {
    key.push_back(word);
    if (const NgramEntry* e = Find(key)) return backoff + e->log10_prob;
    key.pop_back();
    if (key.empty()) break;
    if (const NgramEntry* ctx = Find(key)) backoff += ctx->log10_backoff;
    key.erase(key.begin());
  }
  throw DataError("word id " + std::to_string(word) + " has no unigram");
}

namespace {

void ClosePrefixesTopDown(BackoffLmData* lm) {
  for (int n = lm->order; n >= 2; --n) {
    std::vector<std::vector<WordId>> missing;
    for (const auto& [key, entry] : lm->tables[static_cast<std::size_t>(n - 1)]) {
      std::vector<WordId> prefix(key.begin(), key.end() - 1);
      if (!lm->Find(prefix)) missing.push_back(std::move(prefix));
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    auto& lower = lm->tables[static_cast<std::size_t>(n - 2)];
    for (auto& prefix : missing) {
      std::span<const WordId> ctx(prefix.data(), prefix.size() - 1);
      double est = lm->Log10Prob(ctx, prefix.back());
      lower.emplace(std::move(prefix), NgramEntry{est, 0.0});
    }
  }
}

}  // namespace

BackoffLmData LoadArpa(std::string_view text) {
  TextReader in(text);
  std::string_view line;
  BackoffLmData lm;

  // Header.
  bool found_data = false;
  while (in.NextNonBlank(&line)) {
    if (line.starts_with("\\data\\")) {
      found_data = true;
      break;
    }
  }
  if (!found_data) in.Fail("missing \\data\\ header");

  std::vector<std::size_t> declared;
  for (;;) {
    if (!in.NextNonBlank(&line)) in.Fail("unexpected end of input in \\data\\ section");
    if (!line.starts_with("ngram ")) break;
    auto eq = line.find('=');
    int n = 0;
    std::size_t count = 0;
    if (eq == std::string_view::npos) in.Fail("malformed ngram count line '" + std::string(line) + "'");
    auto lhs = SplitWords(line.substr(6, eq - 6));
    auto rhs = SplitWords(line.substr(eq + 1));
    if (lhs.size() != 1 || rhs.size() != 1 || !ParseInt(std::string_view(lhs[0]), &n) ||
        !ParseInt(std::string_view(rhs[0]), &count)) {
      in.Fail("malformed ngram count line '" + std::string(line) + "'");
    }
    if (n != static_cast<int>(declared.size()) + 1) in.Fail("ngram orders must be declared 1..N in order");
    declared.push_back(count);
  }
  if (declared.empty()) in.Fail("no ngram counts declared");
  lm.order = static_cast<int>(declared.size());
  lm.tables.resize(declared.size());

  // Sections. `line` holds the first non-count line.
  int expected_order = 1;
  for (;;) {
    if (line.starts_with("\\end\\")) break;
    int n = 0;
    if (!(line.starts_with("\\") && line.ends_with("-grams:")) ||
        !ParseInt(line.substr(1, line.size() - 1 - 7), &n)) {
      in.Fail("expected section header, got '" + std::string(line) + "'");
    }
    if (n < 1 || n > lm.order) in.Fail("section for undeclared order " + std::to_string(n));
    if (n != expected_order) in.Fail("sections must appear in order; expected \\" +
                                     std::to_string(expected_order) + "-grams:");
    ++expected_order;
    auto& table = lm.tables[static_cast<std::size_t>(n - 1)];
    std::size_t seen = 0;
    bool more = false;
    while ((more = in.NextNonBlank(&line))) {
      if (line.starts_with("\\")) break;
      auto fields = SplitWords(line);
      if (fields.size() != static_cast<std::size_t>(n) + 1 &&
          fields.size() != static_cast<std::size_t>(n) + 2) {
        in.Fail("expected " + std::to_string(n + 1) + " or " + std::to_string(n + 2) +
                " fields in " + std::to_string(n) + "-gram entry");
      }
      if (++seen > declared[static_cast<std::size_t>(n - 1)]) {
        in.Fail(std::to_string(n) + "-gram count exceeds declared " +
                std::to_string(declared[static_cast<std::size_t>(n - 1)]));
      }
      NgramEntry e;
      if (!ParseDouble(fields[0], &e.log10_prob)) in.Fail("bad probability '" + fields[0] + "'");
      if (fields.size() == static_cast<std::size_t>(n) + 2 &&
          !ParseDouble(fields.back(), &e.log10_backoff)) {
        in.Fail("bad backoff weight '" + fields.back() + "'");
      }
      std::vector<WordId> key;
      key.reserve(static_cast<std::size_t>(n));
      for (int i = 1; i <= n; ++i) {
        const std::string& w = fields[static_cast<std::size_t>(i)];
        if (n == 1) {
          if (lm.vocab.Find(w)) in.Fail("duplicate unigram '" + w + "'");
          key.push_back(lm.vocab.Add(w));
        } else {
          auto id = lm.vocab.Find(w);
          if (!id) in.Fail("word '" + w + "' has no unigram entry");
          key.push_back(*id);
        }
      }
      if (!table.emplace(std::move(key), e).second) in.Fail("duplicate " + std::to_string(n) + "-gram");
    }
    if (seen != declared[static_cast<std::size_t>(n - 1)]) {
      in.Fail(std::to_string(n) + "-gram section has " + std::to_string(seen) +
              " entries, declared " + std::to_string(declared[static_cast<std::size_t>(n - 1)]));
    }
    if (!more) in.Fail("missing \\end\\ marker");
  }
  if (expected_order != lm.order + 1) in.Fail("missing sections for declared orders");

  ClosePrefixesTopDown(&lm);
  return lm;
}

BackoffLmData LoadArpaFile(const std::string& path) { return LoadArpa(ReadFile(path)); }

std::string WriteArpa(const BackoffLmData& lm) {
  std::string out = "\\data\\\n";
  for (int n = 1; n <= lm.order; ++n) out += fmt::format("ngram {}={}\n", n, lm.Count(n));
  for (int n = 1; n <= lm.order; ++n) {
    out += fmt::format("\n\\{}-grams:\n", n);
    const auto& table = lm.tables[static_cast<std::size_t>(n - 1)];
    std::vector<const std::pair<const std::vector<WordId>, NgramEntry>*> rows;
    rows.reserve(table.size());
    for (const auto& kv : table) rows.push_back(&kv);
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->first < b->first; });
    for (const auto* kv : rows) {
      out += fmt::format("{}", kv->second.log10_prob);
      for (WordId w : kv->first) {
        out += ' ';
        out += lm.vocab.Word(w);
      }
      if (n < lm.order) out += fmt::format(" {}", kv->second.log10_backoff);
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

}  // namespace rnnsearch

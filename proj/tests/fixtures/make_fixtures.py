#!/usr/bin/env python3
# Copyright 2026  The rnnsearch authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the committed test fixtures. Pure Python, no project code.

    python3 make_fixtures.py   # run inside tests/fixtures
"""

import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def write(name, text):
    with open(os.path.join(HERE, name), "w") as f:
        f.write(text)


def log10(p):
    return repr(math.log10(p))


def arpa(order, grams):
    """grams[n] is a list of (words tuple, prob, backoff or None)."""
    lines = ["\\data\\"]
    for n in range(1, order + 1):
        lines.append("ngram %d=%d" % (n, len(grams[n])))
    for n in range(1, order + 1):
        lines.append("")
        lines.append("\\%d-grams:" % n)
        for words, prob, bo in grams[n]:
            p = "-99" if prob == 0 else log10(prob)
            line = p + "\t" + " ".join(words)
            if bo is not None:
                line += "\t" + log10(bo)
            lines.append(line)
    lines.append("")
    lines.append("\\end\\")
    return "\n".join(lines) + "\n"


def toy_arpa():
    # p(b|a) = 10^-0.2, bo(a) = 10^-0.1, p(c) = 10^-0.7. The remaining unigrams are
    # chosen so that every context sums to one:
    #   p(b|a) + bo(a) * (1 - p(b)) = 1  =>  p(b) = 1 - (1 - p(b|a)) / bo(a)
    p_ba = 10 ** -0.2
    bo_a = 10 ** -0.1
    p_c = 10 ** -0.7
    p_b = 1 - (1 - p_ba) / bo_a
    p_a = p_end = (1 - p_b - p_c) / 2
    uni = [(("<s>",), 0, 1.0), (("</s>",), p_end, None), (("a",), p_a, bo_a),
           (("b",), p_b, 1.0), (("c",), p_c, 1.0)]
    bi = [(("a", "b"), p_ba, None)]
    return arpa(2, {1: uni, 2: bi})


def uniform_arpa():
    uni = [(("<s>",), 0, 1.0)] + [((w,), 0.25, 1.0) for w in ("</s>", "a", "b", "c")]
    return arpa(1, {1: uni})


def trigram_arpa():
    p = {"</s>": 0.1, "a": 0.3, "b": 0.35, "c": 0.25}
    # Explicit bigrams per context; backoff = leftover / unexplained lower mass.
    bigrams = {"<s>": {"a": 0.6, "b": 0.3}, "a": {"b": 0.5, "c": 0.2}, "b": {"</s>": 0.4}}
    bo1 = {h: (1 - sum(d.values())) / (1 - sum(p[w] for w in d)) for h, d in bigrams.items()}

    def p2(h, w):
        if w in bigrams.get(h, {}):
            return bigrams[h][w]
        return bo1.get(h, 1.0) * p[w]

    trigrams = {("<s>", "a"): {"b": 0.7}, ("a", "b"): {"</s>": 0.5, "a": 0.2}}
    bo2 = {h: (1 - sum(d.values())) / (1 - sum(p2(h[1], w) for w in d)) for h, d in trigrams.items()}
    uni = [(("<s>",), 0, bo1["<s>"])]
    for w in ("</s>", "a", "b", "c"):
        uni.append(((w,), p[w], None if w == "</s>" else bo1.get(w, 1.0)))
    bi = []
    for h, d in bigrams.items():
        for w, q in d.items():
            bi.append(((h, w), q, None if w == "</s>" else bo2.get((h, w), 1.0)))
    tri = [((h[0], h[1], w), q, None) for h, d in trigrams.items() for w, q in d.items()]
    return arpa(3, {1: uni, 2: bi, 3: tri})


# Two-unit Elman network, vocabulary <s> </s> a b.
ELMAN = {
    "vocab": ["<s>", "</s>", "a", "b"],
    "embedding": [[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.5, -0.5]],
    "input": [[0.5, -0.25], [0.75, 0.1]],
    "recurrent": [[0.2, 0.0], [-0.3, 0.4]],
    "bias": [[0.1], [-0.2]],
    "out_w": [[0.0, 0.0], [1.0, -1.0], [0.5, 0.5], [-0.5, 1.0]],
    "out_b": [[-2.0], [0.0], [0.1], [0.2]],
}


def elman_rnnlm():
    e = ELMAN
    lines = ["RNNLM v1 elman 1 2 2 4", " ".join(e["vocab"])]

    def block(name, m):
        lines.append("%s %d %d" % (name, len(m), len(m[0])))
        for row in m:
            lines.append(" ".join(repr(v) for v in row))

    block("embedding", e["embedding"])
    block("layer0.input", e["input"])
    block("layer0.recurrent", e["recurrent"])
    block("layer0.bias", e["bias"])
    block("output.weights", e["out_w"])
    block("output.bias", e["out_b"])
    return "\n".join(lines) + "\n"


def elman_step(h, word):
    """h' = tanh(W_in x + W_rec h + b); log p = log_softmax(W_out h' + b_out)."""
    e = ELMAN
    x = e["embedding"][e["vocab"].index(word)]
    h2 = []
    for r in range(2):
        acc = e["bias"][r][0]
        acc += sum(e["input"][r][c] * x[c] for c in range(2))
        acc += sum(e["recurrent"][r][c] * h[c] for c in range(2))
        h2.append(math.tanh(acc))
    z = [e["out_b"][v][0] + sum(e["out_w"][v][k] * h2[k] for k in range(2)) for v in range(4)]
    m = max(z)
    norm = m + math.log(sum(math.exp(v - m) for v in z))
    return h2, [v - norm for v in z]


def elman_expected():
    lines = ["# input hidden[0] hidden[1] logp(<s>) logp(</s>) logp(a) logp(b)"]
    h = [0.0, 0.0]
    for word in ("<s>", "a", "b"):
        h, logp = elman_step(h, word)
        lines.append(" ".join([word] + [repr(v) for v in h + logp]))
    return "\n".join(lines) + "\n"


def cn_lattice():
    # Paths: x a (0.4), y a (0.3), y b (0.3). All scores live on the LM side.
    arcs = [(0, 1, "x", math.log(0.4)), (0, 2, "y", math.log(0.6)), (1, 3, "a", 0.0),
            (2, 3, "a", math.log(0.5)), (2, 3, "b", math.log(0.5))]
    lines = ["VERSION=1 UTTERANCE=cn4 N=4 L=%d" % len(arcs)]
    for i, t in enumerate([0, 5, 5, 10]):
        lines.append("I=%d t=%d" % (i, t))
    for j, (s, e, w, lm) in enumerate(arcs):
        lines.append("J=%d S=%d E=%d W=%s v=0 a=0.000000 l=%.6f" % (j, s, e, w, lm))
    return "\n".join(lines) + "\n"


def emit(frames, states):
    rows = [" ".join(["-0.693147"] * states) for _ in range(frames)]
    return "EMIT v1 %d %d 0.01\n" % (frames, states) + "\n".join(rows) + "\n"


def main():
    write("toy.arpa", toy_arpa())
    write("uniform.arpa", uniform_arpa())
    write("trigram.arpa", trigram_arpa())
    write("elman2.rnnlm", elman_rnnlm())
    write("elman2.expected", elman_expected())
    write("cn4.lat", cn_lattice())
    write("u1.emit", emit(3, 2))
    write("u2.emit", emit(4, 2))
    write("two.manifest", "u1\tu1.emit\t2\ta b\nu2\tu2.emit\t3\tb c a\n")


if __name__ == "__main__":
    main()

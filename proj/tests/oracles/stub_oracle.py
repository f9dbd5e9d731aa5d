#!/usr/bin/env python3
# Copyright 2026 The ConVerSum Authors
# SPDX-License-Identifier: Apache-2.0
"""Independent re-implementation of the stub backends.

Prints the reference values frozen into the unit and acceptance tests:
stub encoder vectors and the baseline scores of the smoke fixture.
"""

import json
import math
import pathlib
import sys

MASK = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


def splitmix64(state: int) -> int:
    z = (state + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def embed(text: str, dim: int = 16) -> list[float]:
    out = [0.0] * dim
    grams = [text] if len(text) < 3 else [text[i:i + 3] for i in range(len(text) - 2)]
    for gram in grams:
        h = fnv1a64(gram.encode("utf-8"))
        for k in range(dim):
            unit = (splitmix64((h + k) & MASK) >> 11) * 2.0**-53
            out[k] += 2.0 * unit - 1.0
    return out


def normalize(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def cosine(a, b):
    return max(-1.0, min(1.0, sum(x * y for x, y in zip(normalize(a), normalize(b)))))


def lase(pred: str, ref: str, target: str) -> float:
    ms = max(0.0, min(1.0, cosine(embed(pred), embed(ref))))
    first = pred.split()[0]
    lc = 1.0
    if first.startswith("[") and first.endswith("]"):
        lc = 1.0 if first[1:-1] == target else 0.0
    p, r = len(pred.split()), len(ref.split())
    lp = 1.0 if p >= r else math.exp(1.0 - r / p)
    return ms * lc * lp


def bertscore_f1(pred: str, ref: str) -> float:
    pv = [normalize(embed(t)) for t in pred.split()]
    rv = [normalize(embed(t)) for t in ref.split()]

    def cos(a, b):
        return max(-1.0, min(1.0, sum(x * y for x, y in zip(a, b))))

    p = sum(max(cos(a, b) for b in rv) for a in pv) / len(pv)
    r = sum(max(cos(a, b) for b in pv) for a in rv) / len(rv)
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def baseline_prediction(text: str, max_length: int = 80) -> str:
    # Group 0 keeps every sentence; the language tag takes one token.
    body = text.split()[: max_length - 1]
    return " ".join(["[english]"] + body)


def main() -> None:
    root = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(".")
    for text in ["abc", "ab", "hello world"]:
        print(f"encode({text!r}) =", ", ".join(f"{x:.17g}" for x in normalize(embed(text))))

    records = [json.loads(l) for l in open(root / "data/fixtures/smoke/test.jsonl", encoding="utf-8")]
    records.sort(key=lambda r: r["id"])
    lases, berts = [], []
    for r in records:
        pred = baseline_prediction(r["text"])
        lases.append(lase(pred, r["summary"], r["target_lang"]))
        berts.append(bertscore_f1(pred, r["summary"]))
    print(f"smoke baseline n={len(records)} lase={sum(lases) / len(lases):.17g} "
          f"bertscore={sum(berts) / len(berts):.17g}")


if __name__ == "__main__":
    main()

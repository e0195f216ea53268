#!/usr/bin/env python3
"""Independent density oracle for the bundled fixtures.

Reads model files and corpora directly, encodes every word with a naive
lowest-rank-first BPE loop and writes density_expected.json.

Usage: python3 oracle_density.py [FIXTURE_DIR]
"""

import json
import os
import sys
import unicodedata


def byte_to_unicode():
    kept = list(range(0x21, 0x7F)) + list(range(0xA1, 0xAD)) + list(range(0xAE, 0x100))
    table = {b: chr(b) for b in kept}
    n = 0
    for b in range(256):
        if b not in table:
            table[b] = chr(0x100 + n)
            n += 1
    return table


def load_model(path):
    with open(path, encoding="utf-8") as f:
        root = json.load(f)
    model = root.get("model", root)
    inverse = {c: b for b, c in byte_to_unicode().items()}
    vocab = {}
    for rendered in model["vocab"]:
        vocab[bytes(inverse[c] for c in rendered)] = True
    ranks = {}
    for rank, merge in enumerate(model["merges"]):
        left, right = merge.split(" ") if isinstance(merge, str) else merge
        left = bytes(inverse[c] for c in left)
        right = bytes(inverse[c] for c in right)
        ranks[(left, right)] = rank
    return ranks


def naive_encode(ranks, word):
    pieces = [bytes([b]) for b in word]
    while True:
        best = None
        for i in range(len(pieces) - 1):
            r = ranks.get((pieces[i], pieces[i + 1]))
            if r is not None and (best is None or r < best[0]):
                best = (r, i)
        if best is None:
            return pieces
        i = best[1]
        pieces[i : i + 2] = [pieces[i] + pieces[i + 1]]


def is_punct_or_symbol(ch):
    return unicodedata.category(ch)[0] in "PS"


def words_of(text):
    for raw in text.split():
        start, end = 0, len(raw)
        while start < end and is_punct_or_symbol(raw[start]):
            start += 1
        while end > start and is_punct_or_symbol(raw[end - 1]):
            end -= 1
        if start < end:
            yield raw[start:end]


def density(ranks, path):
    with open(path, encoding="utf-8") as f:
        text = f.read()
    words = tokens = one = le2 = 0
    for w in words_of(text):
        n = len(naive_encode(ranks, w.encode("utf-8")))
        words += 1
        tokens += n
        one += n == 1
        le2 += n <= 2
    return {
        "words": words,
        "tokens": tokens,
        "tok_per_word": tokens / words,
        "pct_1": 100.0 * one / words,
        "pct_le2": 100.0 * le2 / words,
        "pct_gt2": 100.0 * (words - le2) / words,
    }


def main():
    root = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))
    models = {"base": "base.json", "surgered": "surgered.json"}
    corpora = {"bilingual": "bilingual.txt", "cyrillic": "cyrillic.txt"}
    cells = []
    for label, file in models.items():
        ranks = load_model(os.path.join(root, file))
        for corpus, cfile in corpora.items():
            cell = {"model": label, "corpus": corpus}
            cell.update(density(ranks, os.path.join(root, cfile)))
            cells.append(cell)
    with open(os.path.join(root, "density_expected.json"), "w", encoding="utf-8") as f:
        json.dump(cells, f, indent=2, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    main()

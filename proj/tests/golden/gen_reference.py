#!/usr/bin/env python3
"""Independent re-implementation of the mask generator procedure.

Used once to produce the golden files in this directory; the C++ generator
must reproduce them byte for byte. Run from this directory:

    python3 gen_reference.py
"""
import json
import math

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK64

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound):
        threshold = ((1 << 64) - bound) % bound
        while True:
            r = self.next()
            if r >= threshold:
                return r % bound


def draw_front(pool, count, rng):
    for i in range(count):
        j = i + rng.below(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]


def preferred(kind, param, q, n):
    if kind == "uniform":
        return 0, n
    if kind == "block":
        b = min(param, n)
        j = 0
        while j + 1 < b and (j + 1) * n // b <= q:
            j += 1
        return j * n // b, (j + 1) * n // b
    w = min(param, n)
    lo = min(max(q - w // 2, 0), n - w)
    return lo, lo + w


def generate(n, k, heads, kind, param, noise, seed):
    rng = SplitMix64(seed)
    out = []
    for _ in range(heads):
        rows = []
        for q in range(n):
            row = [0] * n
            lo, hi = preferred(kind, param, q, n)
            pref = [c for c in range(n) if lo <= c < hi]
            other = [c for c in range(n) if not lo <= c < hi]
            if len(pref) >= k:
                draw_front(pref, k, rng)
                for c in pref[:k]:
                    row[c] = 1
            else:
                for c in pref:
                    row[c] = 1
                rest = k - len(pref)
                draw_front(other, rest, rng)
                for c in other[:rest]:
                    row[c] = 1
            moved = min(math.floor(noise * k), n - k)
            if moved:
                sel = [c for c in range(n) if row[c]]
                vac = [c for c in range(n) if not row[c]]
                draw_front(sel, moved, rng)
                for c in sel[:moved]:
                    row[c] = 0
                draw_front(vac, moved, rng)
                for c in vac[:moved]:
                    row[c] = 1
            rows.append("".join(str(v) for v in row))
        out.append(rows)
    doc = {"format": "sata-mask", "version": 1, "seq_len": n, "n_heads": heads,
           "k_per_query": k, "heads": out}
    return json.dumps(doc, indent=2) + "\n"


GOLDENS = {
    "gen_n8_k2_block2_seed1.json": (8, 2, 1, "block", 2, 0.0, 1),
    "gen_n12_k5_banded4_noise04_seed99.json": (12, 5, 2, "banded", 4, 0.4, 99),
    "gen_n10_k3_uniform_noise05_seed18446744073709551615.json": (10, 3, 2, "uniform", 0, 0.5, MASK64),
}

if __name__ == "__main__":
    for name, args in GOLDENS.items():
        with open(name, "w") as f:
            f.write(generate(*args))

#!/usr/bin/env python3
"""Write a small feature table with gaps and its Pearson matrix.

The matrix is computed with exact rational arithmetic (pairwise deletion,
null when fewer than 3 complete pairs or a constant column), so it serves
as an oracle independent of the Rust implementation.
"""

import csv
import json
import math
import os
import random
from fractions import Fraction

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "corr_table")
COLUMNS = ["places", "reviews", "income", "vacancy", "permits", "constant", "sparse"]


def table(rng):
    rows = []
    for _ in range(40):
        places = rng.randint(0, 30)
        reviews = round(18 * places**1.3 * rng.uniform(0.7, 1.3), 2) if places else 0
        income = round(40000 + 1500 * places + rng.uniform(-12000, 12000), 2)
        vacancy = round(0.15 - 0.003 * places + rng.uniform(-0.05, 0.05), 4)
        permits = rng.randint(0, 25)
        row = [places, reviews, income, vacancy, permits, 7.5, None]
        for k in (2, 3, 4):
            if rng.random() < 0.15:
                row[k] = None
        rows.append(row)
    # two populated entries: too few pairs for any coefficient
    rows[3][6], rows[17][6] = 1.25, 9.5
    return rows


def pearson(xs, ys):
    pairs = [(Fraction(str(x)), Fraction(str(y))) for x, y in zip(xs, ys) if x is not None and y is not None]
    n = len(pairs)
    if n < 3:
        return None, n
    sx = sum(p[0] for p in pairs)
    sy = sum(p[1] for p in pairs)
    dx = n * sum(p[0] * p[0] for p in pairs) - sx * sx
    dy = n * sum(p[1] * p[1] for p in pairs) - sy * sy
    num = n * sum(p[0] * p[1] for p in pairs) - sx * sy
    if dx == 0 or dy == 0:
        return None, n
    r2 = num * num / (dx * dy)
    return math.copysign(math.sqrt(float(r2)), num), n


def main():
    os.makedirs(OUT, exist_ok=True)
    rows = table(random.Random(99))
    with open(os.path.join(OUT, "table.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow(["" if v is None else v for v in row])
    cols = list(zip(*rows))
    r = [[None] * len(COLUMNS) for _ in COLUMNS]
    n = [[0] * len(COLUMNS) for _ in COLUMNS]
    for i in range(len(COLUMNS)):
        for j in range(len(COLUMNS)):
            r[i][j], n[i][j] = pearson(cols[i], cols[j])
    with open(os.path.join(OUT, "golden_correlation.json"), "w") as f:
        json.dump({"columns": COLUMNS, "r": r, "n": n}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()

"""Regenerates golden_tables.csv from the piecewise table formulas.

Kept independent of the Rust code on purpose: every value below is typed in
from the printed tables, not derived from eigenvalue lists.
"""
import csv
import sys

FAMILIES = [("HnR", range(2, 7)), ("HnC", range(2, 7)), ("HnH", range(2, 7)), ("H2O", [2])]


def mult(family, n):
    return {"HnR": (n - 1, 0), "HnC": (2 * n - 2, 1), "HnH": (4 * n - 4, 3), "H2O": (8, 7)}[family]


def dim(family, n):
    return {"HnR": n, "HnC": 2 * n, "HnH": 4 * n, "H2O": 16}[family]


def kappa(family, n, k):
    if family in ("HnR", "HnC"):
        return k - 1
    if family == "HnH":
        return k - 1 if k <= 4 * n - 3 else 4 * n - 4 + 2 * (k - (4 * n - 3))
    return k - 1 if k <= 9 else 8 + 2 * (k - 9)


def cx(family, n, d):
    if family == "HnR":
        return n - 1 - d if d <= n - 1 else 0
    if family == "HnC":
        if d <= 1:
            return 2 * n - 2 * d
        return 2 * n - 1 - d if d <= 2 * n - 1 else 0
    if family == "HnH":
        if d <= 3:
            return 4 * n + 2 - 2 * d
        return 4 * n - 1 - d if d <= 4 * n - 1 else 0
    if d <= 7:
        return 22 - 2 * d
    return 15 - d if d <= 15 else 0


def main(out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["table", "family", "n", "k_or_d", "value"])
    for family, ns in FAMILIES:
        for n in ns:
            ma, m2a = mult(family, n)
            w.writerow(["multiplicities", family, n, 1, ma])
            w.writerow(["multiplicities", family, n, 2, m2a])
    for family, ns in FAMILIES:
        for n in ns:
            for k in range(1, dim(family, n)):
                w.writerow(["kappa", family, n, k, kappa(family, n, k)])
    for family, ns in FAMILIES:
        for n in ns:
            for d in range(0, dim(family, n) + 1):
                w.writerow(["cx", family, n, d, cx(family, n, d)])


if __name__ == "__main__":
    main(sys.stdout)

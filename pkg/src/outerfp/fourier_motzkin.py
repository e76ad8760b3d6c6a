"""Exact Fourier-Motzkin elimination over the rationals.

A row ``(coeffs, rhs, strict)`` means ``coeffs . y <= rhs`` (``<`` when
strict).  Intended for a handful of variables; redundant rows with identical
directions are merged after every elimination step.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Row = tuple[tuple[Fraction, ...], Fraction, bool]


def _normalize(row: Row) -> Row:
    coeffs, rhs, strict = row
    scale = max((abs(c) for c in coeffs), default=Fraction(0))
    if scale == 0:
        return coeffs, rhs, strict
    return tuple(c / scale for c in coeffs), rhs / scale, strict


def _merge(rows: list[Row]) -> list[Row]:
    best: dict[tuple, tuple[Fraction, bool]] = {}
    for row in rows:
        coeffs, rhs, strict = _normalize(row)
        cur = best.get(coeffs)
        if cur is None or rhs < cur[0] or (rhs == cur[0] and strict and not cur[1]):
            best[coeffs] = (rhs, strict)
    return [(c, r, s) for c, (r, s) in best.items()]


def _trivially_ok(row: Row) -> bool:
    _, rhs, strict = row
    return rhs > 0 or (rhs == 0 and not strict)


def solve(rows: Sequence[Row], nvars: int) -> tuple[Fraction, ...] | None:
    """A point satisfying every row, or ``None`` if the system is infeasible."""
    current = _merge([(tuple(Fraction(c) for c in r[0]), Fraction(r[1]), bool(r[2])) for r in rows])
    levels: list[list[Row]] = [[] for _ in range(nvars)]
    for k in range(nvars - 1, -1, -1):
        pos, neg, rest = [], [], []
        for row in current:
            c = row[0][k]
            if c > 0:
                pos.append(row)
            elif c < 0:
                neg.append(row)
            else:
                rest.append(row)
        levels[k] = pos + neg
        for pc, pr, ps in pos:
            for nc, nr, ns in neg:
                a, b = pc[k], -nc[k]
                coeffs = tuple(b * x + a * y for x, y in zip(pc, nc))
                rest.append((coeffs, b * pr + a * nr, ps or ns))
        current = []
        for row in _merge(rest):
            if all(c == 0 for c in row[0]):
                if not _trivially_ok(row):
                    return None
            else:
                current.append(row)
    for row in current:
        if not _trivially_ok(row):
            return None
    point: list[Fraction] = []
    for k in range(nvars):
        lo = hi = None
        lo_strict = hi_strict = False
        for coeffs, rhs, strict in levels[k]:
            c = coeffs[k]
            bound = (rhs - sum(coeffs[j] * point[j] for j in range(k))) / c
            if c > 0:
                if hi is None or bound < hi or (bound == hi and strict):
                    hi, hi_strict = bound, strict
            else:
                if lo is None or bound > lo or (bound == lo and strict):
                    lo, lo_strict = bound, strict
        if lo is not None and hi is not None:
            if lo > hi or (lo == hi and (lo_strict or hi_strict)):
                return None  # cannot happen for an exact elimination
            value = lo if lo == hi else (lo + hi) / 2
        elif lo is not None:
            value = lo + 1 if lo_strict else lo
        elif hi is not None:
            value = hi - 1 if hi_strict else hi
        else:
            value = Fraction(0)
        point.append(value)
    return tuple(point)

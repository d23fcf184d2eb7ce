"""Measured constants: construction time scaling and scheme sizes."""
from __future__ import annotations

import math
import time
from fractions import Fraction
from typing import Dict, List, Sequence

from .gvcode import derandomized_construct
from .params import CodeParams, minimal_length
from .scheme import build


def construction_scaling(
    q: int = 2,
    k_start: int = 16,
    steps: int = 3,
    delta=Fraction(1, 8),
    mode: str = "fast",
    repeats: int = 3,
) -> List[Dict]:
    """Wall-clock of the construction at fixed m while q^k grows by a factor q per row.

    m is the minimal GV length for the largest k so every row uses the same m.
    Each row keeps the fastest of ``repeats`` runs.
    """
    ks = list(range(k_start, k_start + steps + 1))
    m = minimal_length(q, ks[-1], delta)
    rows = []
    for k in ks:
        params = CodeParams(q=q, m=m, k=k, delta=delta)
        best = math.inf
        for _ in range(repeats):
            start = time.perf_counter()
            derandomized_construct(params, mode=mode, verify=False)
            best = min(best, time.perf_counter() - start)
        row = {"q": q, "k": k, "m": m, "size": q**k, "seconds": best}
        if rows:
            row["ratio"] = best / rows[-1]["seconds"]
        rows.append(row)
    return rows


def size_table(ns: Sequence[int], rs: Sequence[int], gt: bool = True, mode: str = "fast") -> List[Dict]:
    """Tests used by built schemes against r^2 ln n.

    With ``gt`` set, ``r`` is the number of defectives and the family built
    is an (n, r+1)-SSF; the ratio is reported against the SSF strength.
    """
    rows = []
    for n in ns:
        for r in rs:
            strength = r + 1 if gt else r
            b = build(n, strength, mode)
            code = b.params.code
            row = {
                "n": n,
                "r": r,
                "strength": strength,
                "trivial": b.params.trivial,
                "t": b.scheme.t,
                "ratio": b.scheme.t / (strength**2 * math.log(n)),
            }
            if code is not None:
                row.update(q=code.q, k=code.k, m=code.m, mq=code.m * code.q, verified=b.code.verified)
            rows.append(row)
    return rows

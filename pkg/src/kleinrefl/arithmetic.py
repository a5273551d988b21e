"""Imaginary quadratic fields and the covolume filter for reflective Bianchi groups.

For k = Q(sqrt d) with fundamental discriminant d < 0, the smallest covolume
in the commensurability class of PGL(2, O_k) is at least

    |d|^(3/2) * zeta_k(2) / (16 pi^2 h_k),

with zeta_k(2) = zeta(2) * L(2, chi_d). Any maximal arithmetic reflection
group has covolume at most 64 pi^2, so fields whose lower bound exceeds
that cannot carry one. Combined with |d| zeta_k(2) >= h_k (2 pi)^2 / (2w),
the lower bound is at least |d|^(1/2) / 16 when w = 2, giving the crude
range |d| < 2^20 pi^4.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

__all__ = [
    "HATCHER_DISCRIMINANTS",
    "DEFAULT_CUTOFF",
    "CRUDE_CUTOFF_FLOOR",
    "LSeriesBudgetError",
    "FieldRecord",
    "ScanReport",
    "is_fundamental",
    "fundamental_discriminants",
    "kronecker",
    "character_table",
    "class_number",
    "class_number_dirichlet",
    "roots_of_unity",
    "l2_tail_bound",
    "dirichlet_l2",
    "dirichlet_l2_terms",
    "borel_lower_bound",
    "brauer_siegel_holds",
    "crude_cutoff",
    "passes_crude",
    "field_record",
    "scan",
    "hatcher_check",
]

log = logging.getLogger(__name__)

# discriminants for which PGL(2, O_k) is commensurable with a reflection group
HATCHER_DISCRIMINANTS = (-3, -4, -7, -8, -11, -15, -19, -20, -24, -39, -40, -52, -55, -56, -68, -84)

DEFAULT_CUTOFF = 64 * math.pi**2
ZETA2 = math.pi**2 / 6
MAX_TERMS = 10**8
_CHUNK = 1 << 20

with mpmath.workdps(40):
    # |d| < 2^20 pi^4 for integer d, decided without floating point
    CRUDE_CUTOFF_FLOOR = int(mpmath.floor(2**20 * mpmath.pi**4))


class LSeriesBudgetError(RuntimeError):
    """The requested L-series tolerance needs more terms than allowed."""


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


def is_fundamental(d: int) -> bool:
    """True iff d < 0 is the discriminant of an imaginary quadratic field."""
    if d >= -2:
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        return (d // 4) % 4 in (2, 3) and _squarefree(d // 4)
    return False


def fundamental_discriminants(d_min: int, d_max: int) -> list[int]:
    """Fundamental discriminants in [d_min, d_max], ordered by |d| ascending."""
    return [d for d in range(min(d_max, -1), d_min - 1, -1) if is_fundamental(d)]


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    result = 1
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            result = -result
    # Jacobi symbol (d/n), n odd
    a = d % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strip_twos(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split positive x into (odd part, exponent of 2)."""
    low = x & -x
    e = np.frexp(low.astype(float))[1] - 1
    return x >> e, e


def character_table(d: int) -> np.ndarray:
    """chi_d(r) for r = 0 .. |d|-1, computed with a vectorized Jacobi recursion."""
    q = abs(d)
    out = np.ones(q, dtype=np.int64)
    if q == 1:
        return out
    out[0] = 0

    idx = np.arange(1, q, dtype=np.int64)
    n, e = _strip_twos(idx.copy())
    chi2 = 0 if d % 2 == 0 else (1 if d % 8 in (1, 7) else -1)
    twos = e > 0
    out[idx[twos]] = chi2 ** e[twos]

    # Jacobi symbol (d/n) for odd n, only on entries still undecided
    sign = np.ones(len(idx), dtype=np.int64)
    a = np.mod(d, n)
    live = np.arange(len(idx))
    while live.size:
        a_l, n_l = a[live], n[live]
        done = a_l == 0
        finished = live[done]
        sign[finished] = np.where(n_l[done] == 1, sign[finished], 0)
        live, a_l, n_l = live[~done], a_l[~done], n_l[~done]
        if not live.size:
            break
        a_l, e = _strip_twos(a_l)
        r8 = n_l % 8
        flip = (e % 2 == 1) & ((r8 == 3) | (r8 == 5))
        flip ^= (a_l % 4 == 3) & (n_l % 4 == 3)
        sign[live[flip]] *= -1
        a[live], n[live] = n_l % a_l, a_l
    return out * np.concatenate(([1], sign))


def class_number(d: int) -> int:
    """Number of reduced primitive forms (a, b, c) with b^2 - 4ac = d."""
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a negative fundamental discriminant")
    q = -d
    h = 0
    b = q % 2
    while 3 * b * b <= q:
        m = (b * b + q) // 4
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                if math.gcd(math.gcd(a, b), c) == 1:
                    h += 1 if (b == 0 or a == b or a == c) else 2
            a += 1
        b += 2
    return h


def class_number_dirichlet(d: int) -> int:
    """h = w / (2|d|) * |sum_{a<|d|} chi_d(a) a|."""
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a negative fundamental discriminant")
    q = -d
    s = sum(kronecker(d, a) * a for a in range(1, q))
    h = Fraction(roots_of_unity(d), 2 * q) * abs(s)
    if h.denominator != 1:
        raise ArithmeticError(f"class number formula gave non-integer {h} for d = {d}")
    return int(h)


def roots_of_unity(d: int) -> int:
    return {-3: 6, -4: 4}.get(d, 2)


def l2_tail_bound(d: int, n_terms: int) -> float:
    """Bound 2|d|/N^2 on |sum_{n>N} chi_d(n)/n^2|, from Abel summation with |sum chi| <= |d|."""
    return 2 * abs(d) / n_terms**2


def dirichlet_l2_terms(d: int, n_terms: int, table: np.ndarray | None = None) -> tuple[float, float]:
    """Partial sum of L(2, chi_d) over n <= n_terms, and its tail bound."""
    q = abs(d)
    if table is None:
        table = character_table(d)
    parts = []
    for start in range(1, n_terms + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, n_terms + 1), dtype=np.int64)
        parts.append(float(np.dot(table[n % q], 1.0 / (n.astype(float) ** 2))))
    return math.fsum(parts), l2_tail_bound(d, n_terms)


def dirichlet_l2(d: int, tol: float = 1e-8, max_terms: int = MAX_TERMS) -> tuple[float, float]:
    """L(2, chi_d) to within ``tol``; returns ``(value, error_bound)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    n_terms = max(1, math.ceil(math.sqrt(2 * abs(d) / tol)))
    while l2_tail_bound(d, n_terms) >= tol:
        n_terms += 1
    if n_terms > max_terms:
        raise LSeriesBudgetError(f"d = {d}, tol = {tol:g} needs {n_terms} terms (budget {max_terms})")
    return dirichlet_l2_terms(d, n_terms)


def borel_lower_bound(d: int, h: int, zeta2: float) -> float:
    """Lower bound |d|^(3/2) zeta_k(2) / (16 pi^2 h) on the minimal covolume."""
    return abs(d) ** 1.5 * zeta2 / (16 * math.pi**2 * h)


def crude_cutoff() -> float:
    """2^20 pi^4, the discriminant range left by |d|^(1/2)/16 <= 64 pi^2."""
    return 2**20 * math.pi**4


def passes_crude(d: int, cutoff: float = DEFAULT_CUTOFF) -> bool:
    """|d|^(1/2) / 16 <= cutoff; exact integer comparison at the default cutoff."""
    if cutoff == DEFAULT_CUTOFF:
        return abs(d) <= CRUDE_CUTOFF_FLOOR
    return math.sqrt(abs(d)) / 16 <= cutoff


@dataclass(frozen=True)
class FieldRecord:
    d: int
    h: int
    w: int
    l2: float
    l2_error: float
    zeta2: float
    borel_lower: float
    passes_exact: bool
    passes_crude: bool


def brauer_siegel_holds(rec: FieldRecord) -> bool:
    """|d| zeta_k(2) >= h (2 pi)^2 / (2w)."""
    return abs(rec.d) * rec.zeta2 >= rec.h * (2 * math.pi) ** 2 / (2 * rec.w)


def field_record(d: int, cutoff: float = DEFAULT_CUTOFF, tol: float = 1e-8, max_terms: int = MAX_TERMS) -> FieldRecord:
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a negative fundamental discriminant")
    h = class_number(d)
    l2, err = dirichlet_l2(d, tol, max_terms)
    zeta2 = ZETA2 * l2
    borel = borel_lower_bound(d, h, zeta2)
    return FieldRecord(d, h, roots_of_unity(d), l2, err, zeta2, borel, borel <= cutoff, passes_crude(d, cutoff))


@dataclass
class ScanReport:
    cutoff: float
    records: list[FieldRecord]
    n_scanned: int
    n_passing: int
    crude_bound: float = field(default_factory=crude_cutoff)
    d_min: int | None = None
    d_max: int | None = None
    tol: float | None = None

    def by_discriminant(self) -> dict[int, FieldRecord]:
        return {r.d: r for r in self.records}


def _record_task(args):
    return field_record(*args)


def _load_checkpoint(path: Path, header: dict) -> list[FieldRecord]:
    if not path.exists():
        return []
    lines = path.read_text().splitlines()
    if not lines or json.loads(lines[0]) != header:
        log.warning("checkpoint %s belongs to a different run; starting over", path)
        return []
    records = []
    for line in lines[1:]:
        try:
            records.append(FieldRecord(**json.loads(line)))
        except (json.JSONDecodeError, TypeError):
            break  # torn final line
    return records


def scan(
    d_min: int,
    d_max: int = -3,
    cutoff: float = DEFAULT_CUTOFF,
    tol: float = 1e-8,
    *,
    workers: int = 1,
    max_terms: int = MAX_TERMS,
    checkpoint: str | os.PathLike | None = None,
    chunk: int = 512,
    progress=None,
) -> ScanReport:
    """Evaluate every fundamental discriminant in [d_min, d_max].

    Records come back ordered by |d| regardless of ``workers``. With a
    ``checkpoint`` path, completed records are appended as JSON lines
    (after a header line describing the run) and a rerun with the same
    arguments resumes after the last completed |d|.
    """
    if d_min > d_max or d_max >= 0:
        raise ValueError(f"need d_min <= d_max < 0, got [{d_min}, {d_max}]")
    if tol <= 0 or cutoff <= 0:
        raise ValueError("tol and cutoff must be positive")
    ds = fundamental_discriminants(d_min, d_max)

    records: list[FieldRecord] = []
    ckpt = Path(checkpoint) if checkpoint is not None else None
    header = {"d_min": d_min, "d_max": d_max, "cutoff": cutoff, "tol": tol}
    if ckpt is not None:
        records = _load_checkpoint(ckpt, header)
        if records and [r.d for r in records] != ds[: len(records)]:
            log.warning("checkpoint %s is inconsistent; starting over", ckpt)
            records = []
        if records:
            log.info("resuming after |d| = %d (%d records)", abs(records[-1].d), len(records))
        ckpt.parent.mkdir(parents=True, exist_ok=True)
        with ckpt.open("w") as fh:
            fh.write(json.dumps(header) + "\n")
            fh.writelines(json.dumps(asdict(r)) + "\n" for r in records)

    todo = ds[len(records):]
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for i in range(0, len(todo), chunk):
            batch = [(d, cutoff, tol, max_terms) for d in todo[i:i + chunk]]
            if pool is None:
                new = [_record_task(b) for b in batch]
            else:
                new = list(pool.map(_record_task, batch, chunksize=max(1, len(batch) // (4 * workers))))
            records.extend(new)
            if ckpt is not None:
                with ckpt.open("a") as fh:
                    fh.writelines(json.dumps(asdict(r)) + "\n" for r in new)
            if progress is not None:
                progress(len(records), len(ds), abs(records[-1].d))
    finally:
        if pool is not None:
            pool.shutdown()

    return ScanReport(
        cutoff=cutoff,
        records=records,
        n_scanned=d_max - d_min + 1,
        n_passing=sum(r.passes_exact for r in records),
        d_min=d_min,
        d_max=d_max,
        tol=tol,
    )


def hatcher_check(report: ScanReport, discriminants=HATCHER_DISCRIMINANTS) -> bool:
    """Every listed discriminant is in the report, fundamental and under the cutoff."""
    found = report.by_discriminant()
    for d in discriminants:
        rec = found.get(d)
        if rec is None or not is_fundamental(d):
            return False
        if not (rec.passes_exact and rec.borel_lower <= report.cutoff):
            return False
    return True

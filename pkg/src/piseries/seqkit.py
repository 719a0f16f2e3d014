"""Exact generators for the integer/rational sequences used across the workbench.

Every sequence family comes in two independent flavours: a fast generator
(closed sum or recurrence) and an oracle (the defining sum evaluated term by
term).  All arithmetic is exact -- Python integers and ``fractions.Fraction``
-- so the tables can feed congruence checks directly.
"""

from __future__ import annotations

import os

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple, Union

Number = Union[int, Fraction]

__all__ = [
    "SequenceKind",
    "SequenceTable",
    "GCT", "GCT2", "GCT3", "CB2", "CB3", "CB4", "CB63", "CB2SHIFT",
    "CATALAN", "SBC", "DOMB", "FRANEL", "FRANEL4", "GSEQ", "GPOLY",
    "ZAGIER", "CLF", "BETA", "WZAG", "TSMALL", "EULER",
    "gct_direct", "gct_table", "apery_like_table", "table",
    "snk", "tsmall_direct", "legendre_eval",
    "save_table", "load_table", "cached_table",
]


# --------------------------------------------------------------------------
# Sequence kinds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceKind:
    """Tag plus parameters identifying one sequence family."""

    tag: str
    params: Tuple[Number, ...] = ()

    def __str__(self) -> str:
        if not self.params:
            return self.tag
        inner = ",".join(str(p) for p in self.params)
        return f"{self.tag}({inner})"


def GCT(b: int, c: int) -> SequenceKind:
    return SequenceKind("GCT", (b, c))


def GCT2(b: int, c: int) -> SequenceKind:
    return SequenceKind("GCT2", (b, c))


def GCT3(b: int, c: int) -> SequenceKind:
    return SequenceKind("GCT3", (b, c))


CB2 = SequenceKind("CB2")
CB3 = SequenceKind("CB3")
CB4 = SequenceKind("CB4")
CB63 = SequenceKind("CB63")
CB2SHIFT = SequenceKind("CB2SHIFT")
CATALAN = SequenceKind("CATALAN")
DOMB = SequenceKind("DOMB")
FRANEL = SequenceKind("FRANEL")
FRANEL4 = SequenceKind("FRANEL4")
GSEQ = SequenceKind("GSEQ")
ZAGIER = SequenceKind("ZAGIER")
CLF = SequenceKind("CLF")
BETA = SequenceKind("BETA")
WZAG = SequenceKind("WZAG")
TSMALL = SequenceKind("TSMALL")
EULER = SequenceKind("EULER")


def SBC(b: int, c: int) -> SequenceKind:
    return SequenceKind("SBC", (b, c))


def GPOLY(x: Number) -> SequenceKind:
    if isinstance(x, Fraction) and x.denominator == 1:
        x = int(x)
    return SequenceKind("GPOLY", (x,))


@dataclass(frozen=True)
class SequenceTable:
    """Immutable table of exact values indexed 0..n_max."""

    kind: SequenceKind
    values: Tuple[Number, ...]

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> Number:
        return self.values[n]


# --------------------------------------------------------------------------
# Generalized central trinomial coefficients T_n(b, c)
# --------------------------------------------------------------------------

def gct_direct(b: int, c: int, n: int) -> int:
    """T_n(b,c) straight from the defining sum (the oracle)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    total = 0
    for k in range(n // 2 + 1):
        total += comb(n, 2 * k) * comb(2 * k, k) * b ** (n - 2 * k) * c ** k
    return total


def gct_table(b: int, c: int, n_max: int) -> SequenceTable:
    """T_0..T_{n_max}(b,c) by the three-term recurrence.

    (n+1) T_{n+1} = (2n+1) b T_n - n (b^2 - 4c) T_{n-1}; the division by
    n+1 is asserted exact.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    vals: List[int] = [1]
    if n_max >= 1:
        vals.append(b)
    disc = b * b - 4 * c
    for n in range(1, n_max):
        num = (2 * n + 1) * b * vals[n] - n * disc * vals[n - 1]
        q, r = divmod(num, n + 1)
        assert r == 0, f"inexact division in T recurrence at n={n}"
        vals.append(q)
    return SequenceTable(GCT(b, c), tuple(vals))


# --------------------------------------------------------------------------
# Direct-sum definitions for the Apery-like families
# --------------------------------------------------------------------------

def _sbc_value(b: int, c: int, tb: Sequence[int], n: int) -> int:
    return sum(comb(n, k) ** 2 * tb[k] * tb[n - k] for k in range(n + 1))


def _domb_value(n: int) -> int:
    return sum(comb(n, k) ** 2 * comb(2 * k, k) * comb(2 * (n - k), n - k)
               for k in range(n + 1))


def _franel_value(n: int) -> int:
    return sum(comb(n, k) ** 3 for k in range(n + 1))


def _franel4_value(n: int) -> int:
    return sum(comb(n, k) ** 4 for k in range(n + 1))


def _gseq_value(n: int) -> int:
    return sum(comb(n, k) ** 2 * comb(2 * k, k) for k in range(n + 1))


def _gpoly_value(n: int, x: Number) -> Number:
    total: Number = 0
    for k in range(n + 1):
        total += comb(n, k) ** 2 * comb(2 * k, k) * x ** k
    return total


def _zagier_value(n: int) -> int:
    return sum(comb(n, k) * comb(2 * k, k) * comb(2 * (n - k), n - k)
               for k in range(n + 1))


def _beta_value(n: int) -> int:
    return sum(comb(n, k) ** 2 * comb(n + k, k) for k in range(n + 1))


def _wzag_value(n: int) -> int:
    return sum((-1) ** k * 3 ** (n - 3 * k) * comb(n, 3 * k) * comb(3 * k, k)
               * comb(2 * k, k) for k in range(n // 3 + 1))


def _pascal_rows(n_max: int):
    """Yield rows 0..n_max of Pascal's triangle (incremental, no comb calls)."""
    row = [1]
    for _ in range(n_max + 1):
        yield row
        row = [a + b for a, b in zip([0] + row, row + [0])]


def _cb2_list(n_max: int) -> List[int]:
    vals = [1]
    for n in range(n_max):
        vals.append(vals[-1] * (2 * (2 * n + 1)) // (n + 1))
    return vals


def _convolution_table(n_max: int, factor) -> List:
    """Tables of sum_k C(n,k)^e * factor(row, cb, n, k) via shared rows."""
    cb = _cb2_list(n_max)
    out = []
    for n, row in enumerate(_pascal_rows(n_max)):
        out.append(factor(row, cb, n))
    return out


def _sbc_table(b: int, c: int, n_max: int) -> List[int]:
    tb = gct_table(b, c, n_max).values
    return _convolution_table(n_max, lambda row, cb, n: sum(
        row[k] ** 2 * tb[k] * tb[n - k] for k in range(n + 1)))


def _domb_table(n_max: int) -> List[int]:
    return _convolution_table(n_max, lambda row, cb, n: sum(
        row[k] ** 2 * cb[k] * cb[n - k] for k in range(n + 1)))


def _franel4_table(n_max: int) -> List[int]:
    return _convolution_table(n_max, lambda row, cb, n: sum(
        v ** 4 for v in row))


def _gseq_table(n_max: int) -> List[int]:
    return _convolution_table(n_max, lambda row, cb, n: sum(
        row[k] ** 2 * cb[k] for k in range(n + 1)))


def _gpoly_table(x: Number, n_max: int) -> List[Number]:
    return _convolution_table(n_max, lambda row, cb, n: sum(
        row[k] ** 2 * cb[k] * x ** k for k in range(n + 1)))


def _zagier_table(n_max: int) -> List[int]:
    return _convolution_table(n_max, lambda row, cb, n: sum(
        row[k] * cb[k] * cb[n - k] for k in range(n + 1)))


def _beta_table(n_max: int) -> List[int]:
    rows = [list(r) for r in _pascal_rows(2 * n_max)]
    return [sum(rows[n][k] ** 2 * rows[n + k][k] for k in range(n + 1))
            for n in range(n_max + 1)]


def _franel_table(n_max: int) -> List[int]:
    """Franel numbers by the printed second-order recurrence."""
    vals = [1]
    if n_max >= 1:
        vals.append(2)
    for n in range(n_max - 1):
        # (n+2)^2 f_{n+2} = (7n^2+21n+16) f_{n+1} + 8(n+1)^2 f_n
        num = (7 * n * n + 21 * n + 16) * vals[n + 1] + 8 * (n + 1) ** 2 * vals[n]
        q, r = divmod(num, (n + 2) ** 2)
        assert r == 0, f"inexact division in Franel recurrence at n={n}"
        vals.append(q)
    return vals


def _wzag_table(n_max: int) -> List[int]:
    """w_n by the recurrence (n+1)^2 w_{n+1} = (9n(n+1)+3) w_n - 27 n^2 w_{n-1}."""
    vals = [1]
    if n_max >= 1:
        vals.append(3)
    for n in range(1, n_max):
        num = (9 * n * (n + 1) + 3) * vals[n] - 27 * n * n * vals[n - 1]
        q, r = divmod(num, (n + 1) ** 2)
        assert r == 0, f"inexact division in w recurrence at n={n}"
        vals.append(q)
    return vals


def _euler_table(n_max: int) -> List[int]:
    """Euler numbers E_0..E_{n_max}; odd indices are 0 (secant recurrence)."""
    vals = [0] * (n_max + 1)
    vals[0] = 1
    for m in range(1, n_max // 2 + 1):
        # sum_{j=0}^{m} C(2m, 2j) E_{2j} = 0
        acc = sum(comb(2 * m, 2 * j) * vals[2 * j] for j in range(m))
        vals[2 * m] = -acc
    return vals


# --------------------------------------------------------------------------
# s_{n,k} and t_n
# --------------------------------------------------------------------------

def snk(n: int, k: int) -> Fraction:
    """s_{n,k} = (1/C(n,k)) * sum_i C(n,2i) C(n,2(k-i)) C(2i,i) C(2(k-i),k-i)."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    total = 0
    for i in range(k + 1):
        total += (comb(n, 2 * i) * comb(n, 2 * (k - i))
                  * comb(2 * i, i) * comb(2 * (k - i), k - i))
    return Fraction(total, comb(n, k))


def tsmall_direct(n: int) -> Fraction:
    """t_n = sum_{0<k<=n} C(n-1,k-1) (-1)^k 4^{n-k} s_{n+k,k}."""
    total = Fraction(0)
    for k in range(1, n + 1):
        total += comb(n - 1, k - 1) * (-1) ** k * 4 ** (n - k) * snk(n + k, k)
    return total


# --------------------------------------------------------------------------
# Legendre polynomials
# --------------------------------------------------------------------------

def legendre_eval(n: int, x):
    """P_n(x) by the three-term recurrence; exact when x is rational."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return x ** 0  # one, in the arithmetic type of x
    prev = x ** 0
    cur = x
    for m in range(1, n):
        nxt = ((2 * m + 1) * x * cur - m * prev) / (m + 1)
        prev, cur = cur, nxt
    return cur


# --------------------------------------------------------------------------
# Table construction / dispatch
# --------------------------------------------------------------------------

_CROSSCHECK_N = 60


def apery_like_table(kind: SequenceKind, n_max: int) -> SequenceTable:
    """Exact table for any non-GCT kind (GCT kinds go via gct_table)."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    tag = kind.tag
    if tag == "SBC":
        b, c = kind.params
        vals = _sbc_table(int(b), int(c), n_max)
        tb = gct_table(int(b), int(c), n_max).values
        for n in range(min(n_max, _CROSSCHECK_N) + 1):
            assert vals[n] == _sbc_value(int(b), int(c), tb, n)
    elif tag == "DOMB":
        vals = _domb_table(n_max)
        for n in range(min(n_max, _CROSSCHECK_N) + 1):
            assert vals[n] == _domb_value(n)
    elif tag == "FRANEL":
        vals = _franel_table(n_max)
        for n in range(min(n_max, _CROSSCHECK_N) + 1):
            assert vals[n] == _franel_value(n), f"Franel mismatch at n={n}"
    elif tag == "FRANEL4":
        vals = _franel4_table(n_max)
        for n in range(min(n_max, _CROSSCHECK_N) + 1):
            assert vals[n] == _franel4_value(n)
    elif tag == "GSEQ":
        vals = _gseq_table(n_max)
        for n in range(min(n_max, _CROSSCHECK_N) + 1):
            assert vals[n] == _gseq_value(n)
    elif tag == "GPOLY":
        (x,) = kind.params
        vals = _gpoly_table(x, n_max)
        for n in range(min(n_max, _CROSSCHECK_N) + 1):
            assert vals[n] == _gpoly_value(n, x)
    elif tag == "ZAGIER":
        vals = _zagier_table(n_max)
        for n in range(min(n_max, _CROSSCHECK_N) + 1):
            assert vals[n] == _zagier_value(n)
    elif tag == "CLF":
        vals = [2 ** n * z for n, z in enumerate(_zagier_table(n_max))]
    elif tag == "BETA":
        vals = _beta_table(n_max)
        for n in range(min(n_max, _CROSSCHECK_N) + 1):
            assert vals[n] == _beta_value(n)
    elif tag == "WZAG":
        vals = _wzag_table(n_max)
        for n in range(min(n_max, _CROSSCHECK_N) + 1):
            assert vals[n] == _wzag_value(n), f"w mismatch at n={n}"
    elif tag == "TSMALL":
        vals = [tsmall_direct(n) for n in range(n_max + 1)]
    elif tag == "EULER":
        vals = _euler_table(n_max)
    elif tag == "CB2":
        vals = [comb(2 * n, n) for n in range(n_max + 1)]
    elif tag == "CB3":
        vals = [comb(3 * n, n) for n in range(n_max + 1)]
    elif tag == "CB4":
        vals = [comb(4 * n, 2 * n) for n in range(n_max + 1)]
    elif tag == "CB63":
        vals = [comb(6 * n, 3 * n) for n in range(n_max + 1)]
    elif tag == "CB2SHIFT":
        vals = [comb(2 * n, n + 1) for n in range(n_max + 1)]
    elif tag == "CATALAN":
        vals = [comb(2 * n, n) // (n + 1) for n in range(n_max + 1)]
    else:
        raise ValueError(f"unknown sequence kind {kind}")
    return SequenceTable(kind, tuple(vals))


def table(kind: SequenceKind, n_max: int) -> SequenceTable:
    """Build a table for any kind, honoring the PISERIES_CACHE directory."""
    cache_dir = os.environ.get("PISERIES_CACHE")
    if cache_dir:
        return cached_table(kind, n_max, cache_dir)
    return _build_table(kind, n_max)


def _build_table(kind: SequenceKind, n_max: int) -> SequenceTable:
    """Build a table for any kind, including GCT and its stride views."""
    if kind.tag == "GCT":
        b, c = kind.params
        return gct_table(int(b), int(c), n_max)
    if kind.tag in ("GCT2", "GCT3"):
        stride = 2 if kind.tag == "GCT2" else 3
        b, c = kind.params
        base = gct_table(int(b), int(c), stride * n_max)
        return SequenceTable(kind, tuple(base.values[stride * n]
                                         for n in range(n_max + 1)))
    return apery_like_table(kind, n_max)


# --------------------------------------------------------------------------
# Cache files
# --------------------------------------------------------------------------

def _fmt(v: Number) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def _parse_value(s: str) -> Number:
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return int(s)


def save_table(tab: SequenceTable, path: Union[str, Path]) -> None:
    """Write `tag params n_max` header plus one value per line."""
    path = Path(path)
    params = ",".join(str(p) for p in tab.kind.params) or "-"
    lines = [f"{tab.kind.tag} {params} {tab.n_max}"]
    lines.extend(_fmt(v) for v in tab.values)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_table(path: Union[str, Path]) -> SequenceTable:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    tag, params_s, n_max_s = lines[0].split()
    params: Tuple[Number, ...] = ()
    if params_s != "-":
        params = tuple(_parse_value(p) for p in params_s.split(","))
    n_max = int(n_max_s)
    vals = tuple(_parse_value(s) for s in lines[1:n_max + 2])
    if len(vals) != n_max + 1:
        raise ValueError(f"cache {path} truncated")
    return SequenceTable(SequenceKind(tag, params), vals)


def _cache_name(kind: SequenceKind, n_max: int) -> str:
    params = ",".join(str(p) for p in kind.params) or "-"
    safe = params.replace("/", "_")
    return f"{kind.tag}_{safe}_{n_max}.txt"


def cached_table(kind: SequenceKind, n_max: int,
                 cache_dir: Union[str, Path, None] = None) -> SequenceTable:
    """Table lookup with an optional on-disk cache directory.

    A cached table with a larger n_max satisfies smaller requests; a smaller
    one is extended by recomputation and rewritten.
    """
    if cache_dir is None:
        return _build_table(kind, n_max)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    # look for any cached table of this kind that is big enough
    params = ",".join(str(p) for p in kind.params) or "-"
    safe = params.replace("/", "_")
    best = None
    for p in cache_dir.glob(f"{kind.tag}_{safe}_*.txt"):
        try:
            cached_n = int(p.stem.rsplit("_", 1)[1])
        except ValueError:
            continue
        if cached_n >= n_max and (best is None or cached_n < best[0]):
            best = (cached_n, p)
    if best is not None:
        tab = load_table(best[1])
        if tab.kind == kind and tab.n_max >= n_max:
            return SequenceTable(kind, tab.values[:n_max + 1])
    tab = _build_table(kind, n_max)
    save_table(tab, cache_dir / _cache_name(kind, n_max))
    return tab


# In-process memo for hot loops (tables are immutable, safe to share).
_MEMO: Dict[Tuple[SequenceKind, int], SequenceTable] = {}


def memo_table(kind: SequenceKind, n_max: int) -> SequenceTable:
    """Process-wide memoized table; returns a table with n_max' >= n_max."""
    for (k, n), tab in list(_MEMO.items()):
        if k == kind and n >= n_max:
            return tab
    tab = table(kind, n_max)
    _MEMO[(kind, n_max)] = tab
    return tab

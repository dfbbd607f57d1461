"""Overflow-safe three-term recurrences, nodes and the Q transform.

Solutions of (tau - lambda) u = 0 are generated forward from two initial
values.  The running pair is renormalised by powers of two whenever it leaves
[2^-512, 2^512]; every stored value keeps the exponent that was current when it
was produced, so the scaled representation is exact.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Optional

import numpy as np

from ._numerics import Series, compensated_cumsum, fmt_float
from .models import CoefficientModel, Coefficient, as_coefficient

__all__ = [
    "ScaledReal",
    "ScaledArray",
    "SolutionTrace",
    "Minimality",
    "solve_recurrence",
    "node_flags",
    "count_nodes",
    "accumulate_Q",
    "second_solution",
    "minimality_heuristic",
    "write_trace_csv",
]

_RESCALE_BITS = 512
_BIG = 2.0**_RESCALE_BITS
_SMALL = 2.0**-_RESCALE_BITS


@total_ordering
@dataclass(frozen=True)
class ScaledReal:
    """``mantissa * 2**exponent`` with mantissa normalised into [0.5, 1).

    Zero is stored as mantissa 0, exponent 0.
    """

    mantissa: float
    exponent: int = 0

    def __post_init__(self):
        m, e = math.frexp(self.mantissa)
        if m == 0.0:
            e, exp = 0, 0
        else:
            exp = int(self.exponent) + e
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", exp)

    @classmethod
    def from_float(cls, x: float) -> "ScaledReal":
        return cls(float(x), 0)

    @property
    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    @property
    def log2_magnitude(self) -> float:
        if self.mantissa == 0.0:
            return math.nan
        return math.log2(abs(self.mantissa)) + self.exponent

    def to_float(self) -> float:
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            return math.copysign(math.inf, self.mantissa)

    def __float__(self) -> float:
        return self.to_float()

    def __neg__(self) -> "ScaledReal":
        return ScaledReal(-self.mantissa, self.exponent)

    def __abs__(self) -> "ScaledReal":
        return ScaledReal(abs(self.mantissa), self.exponent)

    def __mul__(self, other) -> "ScaledReal":
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(other)
        return ScaledReal(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledReal":
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(other)
        if other.mantissa == 0.0:
            raise ZeroDivisionError("division by a zero ScaledReal")
        return ScaledReal(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def _key(self):
        s = self.sign
        if s == 0:
            return (0, 0, 0.0)
        return (s, s * self.exponent, self.mantissa)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(other)
        return self.mantissa == other.mantissa and self.exponent == other.exponent

    def __lt__(self, other) -> bool:
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(other)
        return self._key() < other._key()

    def __hash__(self) -> int:
        return hash((self.mantissa, self.exponent))


@dataclass(frozen=True)
class ScaledArray:
    """A sequence of scaled reals for indices ``start, start+1, ...``."""

    start: int
    mantissa: np.ndarray
    exponent: np.ndarray

    def __len__(self) -> int:
        return len(self.mantissa)

    @property
    def stop(self) -> int:
        return self.start + len(self) - 1

    def __getitem__(self, n: int) -> ScaledReal:
        i = n - self.start
        if not 0 <= i < len(self):
            raise IndexError(f"index {n} outside [{self.start}, {self.stop}]")
        return ScaledReal(float(self.mantissa[i]), int(self.exponent[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield ScaledReal(float(self.mantissa[i]), int(self.exponent[i]))

    def signs(self) -> np.ndarray:
        return np.sign(self.mantissa).astype(np.int8)

    def log2_magnitude(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            out = np.log2(np.abs(self.mantissa)) + self.exponent
        out[self.mantissa == 0] = np.nan
        return out

    def to_float(self) -> np.ndarray:
        """Plain doubles (may overflow to +-inf)."""
        with np.errstate(over="ignore"):
            return np.ldexp(self.mantissa, self.exponent)

    @classmethod
    def from_floats(cls, values, start: int) -> "ScaledArray":
        m, e = np.frexp(np.asarray(values, dtype=float))
        return cls(start, m, e.astype(np.int64))


def node_flags(a_signs: np.ndarray, u_signs: np.ndarray) -> np.ndarray:
    """Node predicate for n = first .. first+len(a_signs)-1.

    ``u_signs`` covers the same indices plus one more.  A node is u(n) = 0 or
    a(n) u(n) u(n+1) > 0.
    """
    cur = u_signs[:-1].astype(np.int64)
    nxt = u_signs[1:].astype(np.int64)
    return (cur == 0) | (a_signs.astype(np.int64) * cur * nxt > 0)


@dataclass(frozen=True)
class SolutionTrace:
    """u(n) for n = n0-1 .. N together with its nodes in [n0, N-1].

    A zero at N is also listed as a node.
    """

    n0: int
    values: ScaledArray
    nodes: list
    lam: float = 0.0
    Q: Optional[Series] = None

    @property
    def N(self) -> int:
        return self.values.stop

    @classmethod
    def from_values(cls, values, n0: int, a, lam: float = 0.0) -> "SolutionTrace":
        """Wrap explicit values u(n0-1), u(n0), ...; ``a`` gives the node signs."""
        vals = ScaledArray.from_floats(values, n0 - 1)
        a = as_coefficient(a, "a", start=n0 - 1)
        return cls(n0, vals, _find_nodes(vals, a, n0), lam)


def _find_nodes(values: ScaledArray, a: Coefficient, n0: int) -> list:
    s = values.signs()
    N = values.stop
    if N < n0:
        return []
    zeros = np.flatnonzero(s[:-1] == 0) if len(s) > 1 else np.array([], dtype=int)
    if np.any(np.diff(zeros) == 1):
        raise ArithmeticError("solution vanishes at two consecutive indices")
    if N > n0:
        sa = np.sign(a(np.arange(n0, N)))
        flags = node_flags(sa, s[1:])
        nodes = (np.flatnonzero(flags) + n0).tolist()
    else:
        nodes = []
    if s[-1] == 0 and N >= n0:
        nodes.append(N)
    return nodes


def solve_recurrence(
    model: CoefficientModel,
    lam: float,
    init: tuple,
    N: int,
    with_Q: bool = False,
) -> SolutionTrace:
    """Solve a(n)u(n+1) + a(n-1)u(n-1) + (b(n) - lam)u(n) = 0 forward.

    ``init`` is (u(n0-1), u(n0)).  Coefficient domain errors propagate with
    the failing index.
    """
    n0 = model.n0
    if N < n0:
        raise ValueError(f"N={N} must be >= n0={n0}")
    u_prev, u_cur = float(init[0]), float(init[1])
    if u_prev == 0.0 and u_cur == 0.0:
        raise ValueError("initial data must not both vanish")
    a_list = model.a(np.arange(n0 - 1, N)).tolist()  # a(n0-1) .. a(N-1)
    if any(v == 0.0 for v in a_list):
        bad = n0 - 1 + a_list.index(0.0)
        raise ValueError(f"a({bad}) = 0")
    bl_list = (model.b(np.arange(n0, N)) - lam).tolist()  # b(n0) .. b(N-1)

    mant = [u_prev, u_cur]
    expo = [0, 0]
    e = 0
    big, small = _BIG, _SMALL
    for i in range(N - n0):
        nxt = -(bl_list[i] * u_cur + a_list[i] * u_prev) / a_list[i + 1]
        if not (-big <= nxt <= big):
            if not math.isfinite(nxt):
                raise FloatingPointError(f"non-finite value at n={n0 + i + 1}")
            nxt *= small
            u_cur *= small
            e += _RESCALE_BITS
        elif -small < nxt < small and -small < u_cur < small and (nxt != 0.0 or u_cur != 0.0):
            nxt *= big
            u_cur *= big
            e -= _RESCALE_BITS
        mant.append(nxt)
        expo.append(e)
        u_prev, u_cur = u_cur, nxt

    m, fe = np.frexp(np.array(mant))
    values = ScaledArray(n0 - 1, m, fe.astype(np.int64) + np.array(expo, dtype=np.int64))
    nodes = _find_nodes(values, model.a, n0)
    Q = accumulate_Q(model, values, N) if with_Q else None
    return SolutionTrace(n0, values, nodes, float(lam), Q)


def count_nodes(trace: SolutionTrace, model: CoefficientModel, m: int, M: int) -> int:
    """Number of nodes n in [m, M]; needs u(m) .. u(M+1) in the trace."""
    vals = trace.values
    if m < vals.start or M + 1 > vals.stop or m > M:
        raise ValueError(f"range [{m}, {M}] needs u({m})..u({M + 1}); trace holds [{vals.start}, {vals.stop}]")
    s = vals.signs()[m - vals.start : M - vals.start + 2]
    sa = np.sign(model.a(np.arange(m, M + 1)))
    return int(np.count_nonzero(node_flags(sa, s)))


def accumulate_Q(model: CoefficientModel, u, N: int) -> Series:
    """Q(n) = sum_{j=n0-1}^{n-1} -1 / (a(j) u(j) u(j+1)), for n = n0-1 .. N.

    ``u`` is a coefficient-like map, an array holding u(n0-1), u(n0), ...,
    or a :class:`ScaledArray`.  Terms are formed in extended precision and
    summed with compensation.
    """
    n0 = model.n0
    j = np.arange(n0 - 1, N)
    a = model.a(j)
    if isinstance(u, ScaledArray):
        lo, hi = j - u.start, j + 1 - u.start
        if lo.size and (lo[0] < 0 or hi[-1] >= len(u)):
            raise ValueError("u does not cover the summation range")
        m_lo, m_hi = u.mantissa[lo], u.mantissa[hi]
        if np.any(m_lo == 0) or np.any(m_hi == 0):
            bad = int(j[(m_lo == 0) | (m_hi == 0)][0])
            raise ValueError(f"u vanishes near j={bad}; Q is undefined")
        with np.errstate(under="ignore", over="ignore"):
            terms = np.ldexp(-1.0 / (a * m_lo * m_hi), -(u.exponent[lo] + u.exponent[hi]))
    else:
        if isinstance(u, np.ndarray):
            # a table for n0-1, n0, ...; kept in its own (possibly extended) precision
            if len(u) < N - n0 + 2:
                raise ValueError("u does not cover the summation range")
            uv = u[: N - n0 + 2]
        else:
            uv = as_coefficient(u, "u", start=n0 - 1)(np.arange(n0 - 1, N + 1))
        if np.any(uv == 0):
            bad = int(n0 - 1 + np.flatnonzero(uv == 0)[0])
            raise ValueError(f"u({bad}) = 0; Q is undefined")
        uv = uv.astype(np.longdouble)
        terms = (-1.0 / (a.astype(np.longdouble) * uv[:-1] * uv[1:])).astype(float)
    return Series(n0 - 1, compensated_cumsum(terms))


def second_solution(u0, Q: Series) -> Series:
    """û0(n) = u0(n) Q(n) on the indices of Q."""
    uc = as_coefficient(u0, "u0", start=Q.start)
    return Series(Q.start, uc(Q.indices()) * Q.values)


class Minimality(enum.Enum):
    DivergenceLikely = "DivergenceLikely"
    GrowthStalled = "GrowthStalled"
    Inconclusive = "Inconclusive"


def minimality_heuristic(
    Q,
    threshold: float = 10.0,
    window: Optional[int] = None,
    floor: float = 1e-6,
) -> Minimality:
    """Finite-horizon guess whether Q(n) -> infinity.  Never a proof.

    DivergenceLikely if Q(N) > threshold and Q(N) - Q(N - window) > floor;
    GrowthStalled if that increment is at most ``floor``; else Inconclusive.
    """
    vals = np.asarray(Q.values if isinstance(Q, Series) else Q, dtype=float)
    if len(vals) < 2:
        return Minimality.Inconclusive
    if window is None:
        window = max(1, len(vals) // 10)
    window = min(window, len(vals) - 1)
    inc = vals[-1] - vals[-1 - window]
    if inc <= floor:
        return Minimality.GrowthStalled
    if vals[-1] > threshold:
        return Minimality.DivergenceLikely
    return Minimality.Inconclusive


def write_trace_csv(trace: SolutionTrace, stream=None, last: Optional[int] = None) -> str:
    """Rows ``n,u_sign,u_log2mag,is_node,Q`` for n = n0 .. last (default N).

    Returns the text when ``stream`` is None.
    """
    own = stream is None
    if own:
        stream = io.StringIO()
    last = trace.N if last is None else last
    vals = trace.values
    nodes = set(trace.nodes)
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["n", "u_sign", "u_log2mag", "is_node", "Q"])
    signs = vals.signs()
    logs = vals.log2_magnitude()
    for n in range(trace.n0, last + 1):
        i = n - vals.start
        q = ""
        if trace.Q is not None and trace.Q.start <= n <= trace.Q.stop:
            q = fmt_float(trace.Q[n])
        w.writerow([
            n,
            int(signs[i]),
            "" if signs[i] == 0 else fmt_float(logs[i]),
            int(n in nodes),
            q,
        ])
    return stream.getvalue() if own else ""

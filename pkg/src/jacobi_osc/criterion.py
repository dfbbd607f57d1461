"""Oscillation criterion: the sequence

    K(n) = -A(n) u0(n)^4 Q0(n)^2 (b(n) - b0(n)),

whose tail is compared against -1/4.  A liminf above -1/4 means tau is
nonoscillatory (finitely many eigenvalues below the edge), a limsup below
-1/4 means it is oscillatory.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from ._numerics import Series
from .models import CoefficientModel, ModelError, reference_model
from .recurrence import Minimality, accumulate_Q, minimality_heuristic, solve_recurrence

__all__ = [
    "THRESHOLD",
    "DEFAULT_MARGIN",
    "DEFAULT_WINDOW",
    "DegenerateMeanError",
    "Verdict",
    "CriterionSeries",
    "Classification",
    "harmonic_A",
    "reference_solution",
    "criterion_series",
    "classify",
    "custom_criterion",
]

THRESHOLD = -0.25
DEFAULT_MARGIN = 1e-3
DEFAULT_WINDOW = 0.5
MIN_WINDOW_POINTS = 100


class DegenerateMeanError(ArithmeticError):
    """a(n-1) + a(n+1) = 0, so the harmonic mean A(n) is undefined."""


class Verdict(enum.Enum):
    Nonoscillatory = "Nonoscillatory"
    Oscillatory = "Oscillatory"
    Inconclusive = "Inconclusive"


def harmonic_A(model: CoefficientModel, n):
    """A(n) = 2 a(n-1) a(n+1) / (a(n-1) + a(n+1)); scalar or array ``n``."""
    scalar = np.ndim(n) == 0
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    lo, hi = model.a(n - 1), model.a(n + 1)
    den = lo + hi
    if np.any(den == 0):
        bad = int(n[den == 0][0])
        raise DegenerateMeanError(f"a({bad - 1}) + a({bad + 1}) = 0")
    out = 2.0 * lo * hi / den
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class CriterionSeries:
    n_range: tuple
    K: Series
    tail_inf: float
    tail_sup: float
    window_fraction: float
    N: int
    label: str = ""

    def tail(self) -> np.ndarray:
        m, M = self.n_range
        start = M - int(self.window_fraction * (M - m))
        return self.K.window(start, M)

    def to_csv(self) -> str:
        lines = ["n,K"]
        for n, k in zip(self.K.indices().tolist(), self.K.values.tolist()):
            lines.append(f"{n},{k!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    margin_used: float
    evidence: CriterionSeries

    def report(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "tail_inf": self.evidence.tail_inf,
            "tail_sup": self.evidence.tail_sup,
            "threshold": THRESHOLD,
            "margin": self.margin_used,
            "N": self.evidence.N,
        }
        if self.verdict is Verdict.Inconclusive:
            out["hint"] = (
                "tail straddles -1/4 within the margin; refine with the next "
                "iterated-logarithm family (loglog k+1)"
            )
        return out

    def to_json(self) -> str:
        return json.dumps(self.report())


def reference_solution(model: CoefficientModel, N: int) -> np.ndarray:
    """u0(n) for n = n0-1 .. N, declared or computed, checked positive and non-decreasing.

    Without a declared u0, tau_0 u = 0 is solved from (1, 1) and the result is
    accepted only if positive and non-decreasing on the whole range.
    """
    n0 = model.n0
    if model.u0 is not None:
        u = model.u0(np.arange(n0 - 1, N + 1))
        source = "declared u0"
    else:
        ref = CoefficientModel(a=model.a, b=model.b0, b0=model.b0, n0=n0)
        u = solve_recurrence(ref, 0.0, (1.0, 1.0), N).values.to_float()
        source = "computed reference solution"
    if not np.all(np.isfinite(u)) or np.any(u <= 0):
        bad = int(n0 - 1 + np.flatnonzero(~(u > 0) | ~np.isfinite(u))[0])
        raise ModelError(f"{source} is not positive (n={bad}); the criterion does not apply")
    dec = np.flatnonzero(np.diff(u) < 0)
    if dec.size:
        raise ModelError(f"{source} decreases at n={n0 - 1 + int(dec[0])}; the criterion does not apply")
    return u


def criterion_series(
    model: CoefficientModel,
    N: int,
    window_fraction: float = DEFAULT_WINDOW,
    minimality_threshold: float = 10.0,
) -> CriterionSeries:
    """K(n) for n = n0+1 .. N-1 with min/max over the trailing window."""
    if not 0 < window_fraction < 1:
        raise ValueError("window_fraction must lie in (0, 1)")
    n0 = model.n0
    m, M = n0 + 1, N - 1
    if M <= m:
        raise ValueError(f"N={N} too small for n0={n0}")
    a = model.a(np.arange(n0 - 1, N + 1))
    if np.any(a >= 0):
        raise ModelError("criterion requires a(n) < 0 (flip signs via u(n) -> (-1)^n u(n))")
    u = reference_solution(model, N)
    # K only sees ratios of u0; normalising makes constant u0 exactly scale free
    v = u.astype(np.longdouble) / u[0]
    Q = accumulate_Q(model, v, N)
    if not model.u0_minimal_declared:
        verdict = minimality_heuristic(Q, threshold=minimality_threshold)
        if verdict is not Minimality.DivergenceLikely:
            raise ModelError(f"u0 is not known to be minimal (Q heuristic: {verdict.value})")
    n = np.arange(m, M + 1)
    A = harmonic_A(model, n).astype(np.longdouble)
    vn = v[n - (n0 - 1)]
    w = vn * vn * Q[n].astype(np.longdouble)
    K = (-A * (w * w) * model.perturbation(n).astype(np.longdouble)).astype(float)
    Ks = Series(m, K)
    start = M - int(window_fraction * (M - m))
    tail = Ks.window(start, M)
    return CriterionSeries(
        n_range=(m, M),
        K=Ks,
        tail_inf=float(tail.min()) + 0.0,
        tail_sup=float(tail.max()) + 0.0,
        window_fraction=window_fraction,
        N=N,
        label=model.label,
    )


def classify(series: CriterionSeries, margin: float = DEFAULT_MARGIN) -> Classification:
    """Compare the tail of K against -1/4 with a safety margin."""
    if margin < 0:
        raise ValueError("margin must be non-negative")
    if len(series.tail()) < MIN_WINDOW_POINTS:
        raise ValueError(
            f"tail window holds {len(series.tail())} points; at least {MIN_WINDOW_POINTS} required"
        )
    if series.tail_inf > THRESHOLD + margin:
        verdict = Verdict.Nonoscillatory
    elif series.tail_sup < THRESHOLD - margin:
        verdict = Verdict.Oscillatory
    else:
        verdict = Verdict.Inconclusive
    return Classification(verdict, margin, series)


def custom_criterion(
    a,
    u0,
    b,
    N: int,
    *,
    n0: int = 1,
    margin: float = DEFAULT_MARGIN,
    window_fraction: float = DEFAULT_WINDOW,
    minimality_threshold: float = 10.0,
) -> Classification:
    """New criterion from an arbitrary pair (a, u0): b0 = b_from_u(a, u0)."""
    model = reference_model(a, u0, b, n0=n0, sample=min(N, 10_000))
    series = criterion_series(model, N, window_fraction, minimality_threshold)
    return classify(series, margin)

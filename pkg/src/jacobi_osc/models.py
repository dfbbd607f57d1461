"""Coefficient families for half-line Jacobi difference expressions.

Throughout the package the difference expression is

    (tau f)(n) = a(n) f(n+1) + a(n-1) f(n-1) + b(n) f(n),

so that ``a = -1, b = 2`` is the free operator with spectrum [0, 4].  A
:class:`CoefficientModel` bundles the coefficients ``a``, ``b``, a reference
diagonal ``b0`` and (optionally) a positive solution ``u0`` of the reference
expression ``tau_0 u0 = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

__all__ = [
    "CoefficientDomainError",
    "ModelError",
    "Coefficient",
    "CoefficientModel",
    "IteratedLogThresholds",
    "as_coefficient",
    "iterated_log",
    "e_threshold",
    "kneser_family",
    "loglog_family",
    "loglog_bk",
    "loglog_uk",
    "loglog_start",
    "btilde_minus_bk",
    "variable_a_family",
    "reference_model",
    "table_model",
    "b_from_u",
    "u0_residual_ulps",
    "check_model",
    "model_from_config",
]


class CoefficientDomainError(ValueError):
    """A coefficient could not be evaluated at some index."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class ModelError(ValueError):
    """A model violates one of its declared invariants."""


# ---------------------------------------------------------------------------
# Coefficient sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Coefficient:
    """An index -> real map: an evaluator plus an optional finite table.

    Table entries take precedence where defined; the table holds indices
    ``table_start, table_start + 1, ...``.  ``func`` receives an int64 array
    when ``vectorized`` is true and a Python int otherwise.
    """

    func: Optional[Callable] = None
    table: Optional[np.ndarray] = None
    table_start: int = 0
    vectorized: bool = True
    name: str = "coefficient"

    def __call__(self, n):
        if isinstance(n, (int, np.integer)):
            return float(self._eval(np.array([int(n)], dtype=np.int64))[0])
        return self._eval(np.asarray(n, dtype=np.int64))

    def _eval(self, n: np.ndarray) -> np.ndarray:
        out = np.empty(n.shape, dtype=float)
        if self.table is not None:
            pos = n - self.table_start
            inside = (pos >= 0) & (pos < len(self.table))
            out[inside] = self.table[pos[inside]]
        else:
            inside = np.zeros(n.shape, dtype=bool)
        rest = ~inside
        if rest.any():
            if self.func is None:
                bad = int(n[rest].flat[0])
                raise CoefficientDomainError(
                    f"{self.name}({bad}) is outside its table "
                    f"[{self.table_start}, {self.table_start + len(self.table) - 1}]",
                    bad,
                )
            idx = n[rest]
            with np.errstate(all="ignore"):
                if self.vectorized:
                    vals = np.asarray(self.func(idx), dtype=float)
                    vals = np.broadcast_to(vals, idx.shape)
                else:
                    vals = np.array([self.func(int(i)) for i in idx.ravel()], dtype=float)
                    vals = vals.reshape(idx.shape)
            out[rest] = vals
        finite = np.isfinite(out)
        if not finite.all():
            bad = int(n[~finite].flat[0])
            raise CoefficientDomainError(f"{self.name}({bad}) is not finite", bad)
        return out

    def scaled(self, gamma: float) -> "Coefficient":
        return Coefficient(
            func=lambda n: gamma * self(n),
            vectorized=True,
            name=f"{gamma}*{self.name}",
        )


def _const(value: float, name: str) -> Coefficient:
    value = float(value)
    return Coefficient(func=lambda n: np.full(np.shape(n), value), name=name)


def as_coefficient(obj, name: str = "coefficient", start: int = 0) -> Coefficient:
    """Coerce a number, array, callable or :class:`Coefficient`.

    Arrays become tables starting at ``start``.  Plain callables are
    evaluated element by element; wrap them in ``Coefficient(f, vectorized=True)``
    when they accept numpy arrays.
    """
    if isinstance(obj, Coefficient):
        return obj
    if isinstance(obj, (int, float, np.floating, np.integer)):
        return _const(obj, name)
    if callable(obj):
        return Coefficient(func=obj, vectorized=False, name=name)
    arr = np.asarray(obj, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name}: table must be one-dimensional")
    return Coefficient(table=arr, table_start=start, name=name)


# ---------------------------------------------------------------------------
# Iterated logarithms
# ---------------------------------------------------------------------------


def e_threshold(k: int) -> float:
    """Left end of the domain of ``ln_k``: e_1 = 0 and e_k = exp(e_{k-1})."""
    if k < 1:
        raise ValueError("e_threshold is defined for k >= 1")
    e = 0.0
    for _ in range(k - 1):
        e = math.exp(e) if e < 709.0 else math.inf
    return e


@dataclass(frozen=True)
class IteratedLogThresholds:
    k: int
    e_k: float

    @classmethod
    def of(cls, k: int) -> "IteratedLogThresholds":
        return cls(k, e_threshold(k))


def iterated_log(k: int, x):
    """``ln_0(x) = x`` and ``ln_k(x) = ln_{k-1}(ln x)``, defined for x > e_k.

    Accepts a scalar or an array; raises ``ValueError`` outside the domain.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    scalar = np.ndim(x) == 0
    y = np.asarray(x, dtype=float)
    if k >= 1:
        ek = e_threshold(k)
        if not np.all(y > ek):
            raise ValueError(f"ln_{k}(x) requires x > e_{k} = {ek!r}")
        for _ in range(k):
            y = np.log(y)
    return float(y) if scalar else y


def _log_table(k: int, n: np.ndarray) -> list[np.ndarray]:
    """``[ln_0(n), ..., ln_k(n)]`` as float arrays."""
    logs = [np.asarray(n, dtype=float)]
    for _ in range(k):
        with np.errstate(all="ignore"):
            logs.append(np.log(logs[-1]))
    return logs


def loglog_start(k: int) -> int:
    """Smallest integer n >= 1 with ln_k(n) >= 0.5."""
    if k < 0:
        raise ValueError("k must be non-negative")
    x = 0.5
    for _ in range(k):
        x = math.exp(x)
    n = max(1, math.ceil(x))

    def ok(m: int) -> bool:
        return m > e_threshold(k) if k >= 1 else True

    while not (ok(n) and iterated_log(k, float(n)) >= 0.5):
        n += 1
    while n > 1 and ok(n - 1) and iterated_log(k, float(n - 1)) >= 0.5:
        n -= 1
    return n


def loglog_bk(k: int, n) -> np.ndarray:
    """b_k(n) = 2 - 1/4 sum_{j<k} 1 / prod_{l<=j} ln_l(n)^2."""
    logs = _log_table(k, n)
    total = np.zeros(np.shape(logs[0]))
    prod = np.ones(np.shape(logs[0]))
    for j in range(k):
        prod = prod * logs[j]
        total = total + 1.0 / (prod * prod)
    return 2.0 - 0.25 * total


def loglog_uk(k: int, n) -> np.ndarray:
    """u_k(n) = sqrt(prod_{j<k} ln_j(n))."""
    logs = _log_table(max(k - 1, 0), n)
    prod = np.ones(np.shape(logs[0]))
    for j in range(k):
        prod = prod * logs[j]
    return np.sqrt(prod)


def _loglog_scale(k: int, n) -> np.ndarray:
    """(prod_{j<=k} ln_j(n))^2, the perturbation scale of the k-th family."""
    logs = _log_table(k, n)
    prod = np.ones(np.shape(logs[0]))
    for j in range(k + 1):
        prod = prod * logs[j]
    return prod * prod


def _uk_log_ratio(k: int, n: np.ndarray, step: int) -> np.ndarray:
    """log(u_k(n+step) / u_k(n)) evaluated through log1p chains."""
    logs = _log_table(k, n)
    d = np.full(np.shape(logs[0]), float(step))
    total = np.zeros(np.shape(logs[0]))
    for j in range(k):
        # d holds ln_j(n+step) - ln_j(n); the next difference is log1p(d / ln_j(n))
        d = np.log1p(d / logs[j])
        total = total + d
    return 0.5 * total


def btilde_minus_bk(k: int, n) -> np.ndarray:
    """(u_k(n+1) + u_k(n-1)) / u_k(n) - b_k(n) without catastrophic cancellation."""
    n = np.asarray(n, dtype=np.int64)
    logs = _log_table(k, n)
    bk_minus_two = np.zeros(np.shape(logs[0]))
    prod = np.ones(np.shape(logs[0]))
    for j in range(k):
        prod = prod * logs[j]
        bk_minus_two = bk_minus_two + 1.0 / (prod * prod)
    bk_minus_two = -0.25 * bk_minus_two
    # log(u_k(n+-1)/u_k(n)) = +-odd + even; the even part is carried separately
    # (sigma = d+ + d-) so that neither part is formed by cancellation.
    shape = np.shape(logs[0])
    dp, dm, sigma = np.ones(shape), -np.ones(shape), np.zeros(shape)
    odd, even = np.zeros(shape), np.zeros(shape)
    for j in range(k):
        x, y = dp / logs[j], dm / logs[j]
        sigma = np.log1p(sigma / logs[j] + x * y)
        dp, dm = np.log1p(x), np.log1p(y)
        odd = odd + (dp - dm)
        even = even + sigma
    odd *= 0.25
    even *= 0.25
    half = np.sinh(0.5 * odd)
    bt_minus_two = 2.0 * (np.expm1(even) * np.cosh(odd) + 2.0 * half * half)
    return bt_minus_two - bk_minus_two


# ---------------------------------------------------------------------------
# The model
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoefficientModel:
    """Coefficients of tau and of the reference expression tau_0.

    ``db``, when present, evaluates ``b - b0`` directly; families whose
    perturbation is tiny compared with ``b0`` supply it so the criterion does
    not lose digits to cancellation.
    """

    a: Coefficient
    b: Coefficient
    b0: Coefficient
    u0: Optional[Coefficient] = None
    n0: int = 1
    u0_minimal_declared: bool = False
    a_bounds: Optional[tuple[float, float]] = None
    label: str = ""
    db: Optional[Coefficient] = None
    config: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n0 < 1:
            raise ModelError("n0 must be >= 1")
        if self.a_bounds is not None:
            lo, hi = self.a_bounds
            if not 0 < lo <= hi:
                raise ModelError(f"a_bounds must satisfy 0 < a0 <= A0, got {self.a_bounds}")

    def perturbation(self, n):
        """b(n) - b0(n)."""
        if self.db is not None:
            return self.db(n)
        return self.b(n) - self.b0(n)

    def with_u0_scaled(self, gamma: float) -> "CoefficientModel":
        if self.u0 is None:
            raise ModelError("model has no u0 to rescale")
        if not gamma > 0:
            raise ValueError("gamma must be positive")
        return replace(self, u0=self.u0.scaled(gamma), label=f"{self.label} [u0*{gamma}]")

    def shifted(self, lam: float) -> "CoefficientModel":
        """The model for tau - lam (diagonal shifted by -lam)."""
        if lam == 0:
            return self
        b = self.b
        return replace(
            self,
            b=Coefficient(func=lambda n: b(n) - lam, name="b-lambda"),
            db=None,
            label=f"{self.label} - {lam}",
        )


def b_from_u(a, u) -> Coefficient:
    """The diagonal making u a solution of a(n)u(n+1) + a(n-1)u(n-1) + b(n)u(n) = 0."""
    a = as_coefficient(a, "a")
    u = as_coefficient(u, "u")

    def b(n):
        n = np.asarray(n, dtype=np.int64)
        un = u(n)
        if np.any(un == 0):
            bad = int(n[un == 0].flat[0])
            raise ZeroDivisionError(f"u({bad}) = 0")
        return -(a(n) * u(n + 1) + a(n - 1) * u(n - 1)) / un

    return Coefficient(func=b, name="b_from_u")


def kneser_family(c: float) -> CoefficientModel:
    """a = -1, b(n) = 2 - c/n^2 against the free reference b0 = 2, u0 = 1."""
    c = float(c)

    def b(n):
        nf = np.asarray(n, dtype=float)
        return 2.0 - c / (nf * nf)

    def db(n):
        nf = np.asarray(n, dtype=float)
        return -c / (nf * nf)

    return CoefficientModel(
        a=_const(-1.0, "a"),
        b=Coefficient(func=b, name="b"),
        b0=_const(2.0, "b0"),
        u0=_const(1.0, "u0"),
        n0=1,
        u0_minimal_declared=True,
        a_bounds=(1.0, 1.0),
        label=f"kneser(c={c!r})",
        db=Coefficient(func=db, name="b-b0"),
        config={"family": "kneser", "params": {"c": c}, "n0": 1},
    )


def loglog_family(k: int, c: float) -> CoefficientModel:
    """The k-th iterated-logarithm refinement of the Kneser family.

    b(n) = b_k(n) + c / (prod_{j<=k} ln_j(n))^2 with reference solution
    u0 = u_k = sqrt(prod_{j<k} ln_j(n)).  The reference diagonal is the exact
    partner of u_k, i.e. b0 = (u_k(n+1) + u_k(n-1)) / u_k(n), which differs
    from b_k by O(n^-3).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    c = float(c)
    n0 = loglog_start(k)

    def b(n):
        return loglog_bk(k, n) + c / _loglog_scale(k, n)

    def u0(n):
        return loglog_uk(k, n)

    def db(n):
        n = np.asarray(n, dtype=np.int64)
        if k == 0:
            return c / _loglog_scale(k, n)
        return c / _loglog_scale(k, n) - btilde_minus_bk(k, n)

    a = _const(-1.0, "a")
    u = Coefficient(func=u0, name="u_k")
    return CoefficientModel(
        a=a,
        b=Coefficient(func=b, name="b"),
        b0=b_from_u(a, u),
        u0=u,
        n0=n0,
        u0_minimal_declared=True,
        a_bounds=(1.0, 1.0),
        label=f"loglog(k={k}, c={c!r})",
        db=Coefficient(func=db, name="b-b0"),
        config={"family": "loglog", "params": {"k": int(k), "c": c}, "n0": n0},
    )


def _sample_a(a: Coefficient, n0: int, count: int) -> np.ndarray:
    return a(np.arange(n0 - 1, n0 - 1 + count))


def variable_a_family(
    a,
    b=None,
    *,
    db=None,
    n0: int = 1,
    a_bounds: Optional[tuple[float, float]] = None,
    sample: int = 10_000,
    label: str = "variable_a",
) -> CoefficientModel:
    """Reference b0(n) = -a(n) - a(n-1) with u0 = 1.

    Give either ``b`` or the perturbation ``db = b - b0`` (default: b = b0).
    Sign-indefinite ``a`` is rejected on the sampled range.  Since
    a0 <= |a| <= A0, the sum of -1/a(j) diverges and u0 = 1 is minimal.
    """
    a = as_coefficient(a, "a", start=n0 - 1)
    vals = _sample_a(a, n0, sample)
    if np.any(vals == 0):
        bad = n0 - 1 + int(np.flatnonzero(vals == 0)[0])
        raise CoefficientDomainError(f"a({bad}) = 0", bad)
    if not (np.all(vals < 0) or np.all(vals > 0)):
        bad = n0 - 1 + int(np.flatnonzero(np.sign(vals) != np.sign(vals[0]))[0])
        raise ModelError(f"a(n) changes sign (first at n={bad}); sign-indefinite a is not supported")
    if a_bounds is None:
        a_bounds = (float(np.min(np.abs(vals))), float(np.max(np.abs(vals))))

    def b0f(n):
        n = np.asarray(n, dtype=np.int64)
        return -a(n) - a(n - 1)

    b0c = Coefficient(func=b0f, name="b0")
    if b is not None and db is not None:
        raise ValueError("give b or db, not both")
    if b is not None:
        bc = as_coefficient(b, "b", start=n0 - 1)
        dbc = None
    else:
        dbc = as_coefficient(0.0 if db is None else db, "b-b0", start=n0 - 1)
        bc = Coefficient(func=lambda n: b0c(n) + dbc(n), name="b")
    return CoefficientModel(
        a=a,
        b=bc,
        b0=b0c,
        u0=_const(1.0, "u0"),
        n0=n0,
        u0_minimal_declared=True,
        a_bounds=a_bounds,
        label=label,
        db=dbc,
    )


def reference_model(
    a,
    u0,
    b=None,
    *,
    db=None,
    n0: int = 1,
    a_bounds: Optional[tuple[float, float]] = None,
    minimal: bool = False,
    sample: int = 10_000,
    label: str = "custom",
) -> CoefficientModel:
    """A model with b0 = b_from_u(a, u0) for an arbitrary positive u0."""
    a = as_coefficient(a, "a", start=n0 - 1)
    u = as_coefficient(u0, "u0", start=n0 - 1)
    if a_bounds is None:
        vals = np.abs(_sample_a(a, n0, sample))
        a_bounds = (float(vals.min()), float(vals.max()))
    b0c = b_from_u(a, u)
    if b is not None and db is not None:
        raise ValueError("give b or db, not both")
    if b is not None:
        bc, dbc = as_coefficient(b, "b", start=n0 - 1), None
    else:
        dbc = as_coefficient(0.0 if db is None else db, "b-b0", start=n0 - 1)
        bc = Coefficient(func=lambda n: b0c(n) + dbc(n), name="b")
    return CoefficientModel(
        a=a,
        b=bc,
        b0=b0c,
        u0=u,
        n0=n0,
        u0_minimal_declared=minimal,
        a_bounds=a_bounds,
        label=label,
        db=dbc,
    )


def table_model(a, b, *, n0: int = 1, b0=None, u0=None, label: str = "table") -> CoefficientModel:
    """Finite tables; every array holds indices n0-1, n0, n0+1, ...

    Without ``b0`` the reference is the variable-a baseline b0 = -a(n) - a(n-1)
    with u0 = 1.
    """
    a_arr = np.asarray(a, dtype=float)
    zero = np.flatnonzero(a_arr == 0)
    if zero.size:
        bad = n0 - 1 + int(zero[0])
        raise CoefficientDomainError(f"a({bad}) = 0: off-diagonal entries must be nonzero", bad)
    ac = as_coefficient(a_arr, "a", start=n0 - 1)
    bc = as_coefficient(b, "b", start=n0 - 1)
    bounds = (float(np.abs(a_arr).min()), float(np.abs(a_arr).max()))
    if b0 is None:
        def b0f(n):
            n = np.asarray(n, dtype=np.int64)
            return -ac(n) - ac(n - 1)

        b0c = Coefficient(func=b0f, name="b0")
        u0c = _const(1.0, "u0") if u0 is None else as_coefficient(u0, "u0", start=n0 - 1)
    else:
        b0c = as_coefficient(b0, "b0", start=n0 - 1)
        u0c = None if u0 is None else as_coefficient(u0, "u0", start=n0 - 1)
    return CoefficientModel(
        a=ac,
        b=bc,
        b0=b0c,
        u0=u0c,
        n0=n0,
        u0_minimal_declared=False,
        a_bounds=bounds,
        label=label,
    )


# ---------------------------------------------------------------------------
# Invariant checks
# ---------------------------------------------------------------------------


def u0_residual_ulps(model: CoefficientModel, n) -> np.ndarray:
    """|a(n)u0(n+1) + a(n-1)u0(n-1) + b0(n)u0(n)| in units of the largest term's ulp."""
    if model.u0 is None:
        raise ModelError("model has no u0")
    n = np.asarray(n, dtype=np.int64)
    t1 = model.a(n) * model.u0(n + 1)
    t2 = model.a(n - 1) * model.u0(n - 1)
    t3 = model.b0(n) * model.u0(n)
    largest = np.maximum(np.maximum(np.abs(t1), np.abs(t2)), np.abs(t3))
    return np.abs(t1 + t2 + t3) / np.spacing(largest)


def check_model(
    model: CoefficientModel,
    n_max: int = 10**6,
    samples: int = 1000,
    seed: int = 0,
    tol_ulps: float = 4.0,
) -> None:
    """Check the model invariants on a pseudo-random sample of indices.

    Raises :class:`ModelError` (or :class:`CoefficientDomainError`) on the
    first violation.
    """
    rng = np.random.default_rng(seed)
    lo = model.n0
    hi = max(n_max, lo + 1)
    n = np.unique(np.concatenate([np.arange(lo, min(lo + 20, hi)), rng.integers(lo, hi, size=samples)]))
    a_vals = model.a(np.concatenate([[lo - 1], n]))
    if np.any(a_vals == 0):
        raise ModelError("a(n) vanishes on the sampled range")
    if model.a_bounds is not None:
        a0, A0 = model.a_bounds
        absa = np.abs(a_vals)
        slack = 4 * np.spacing(A0)
        if np.any(absa < a0 - slack) or np.any(absa > A0 + slack):
            raise ModelError(f"|a(n)| leaves the declared bounds {model.a_bounds}")
    if model.u0 is None:
        return
    u_lo = model.u0(n - 1)
    u_n = model.u0(n)
    u_hi = model.u0(n + 1)
    if np.any(u_n <= 0) or np.any(u_lo <= 0):
        raise ModelError("u0 is not positive on the sampled range")
    if np.any(u_hi < u_n) or np.any(u_n < u_lo):
        bad = int(n[(u_hi < u_n) | (u_n < u_lo)][0])
        raise ModelError(f"u0 is not non-decreasing near n={bad}")
    ulps = u0_residual_ulps(model, n)
    if np.any(ulps > tol_ulps):
        bad = int(n[np.argmax(ulps)])
        raise ModelError(
            f"u0 does not solve tau_0 u0 = 0 at n={bad} "
            f"(residual {float(ulps.max()):.3g} ulp > {tol_ulps})"
        )


# ---------------------------------------------------------------------------
# Structured-text configs
# ---------------------------------------------------------------------------


def _expr(value, name: str, n0: int) -> Coefficient:
    """Number -> constant; list -> table from n0-1; {"const", "coef", "power"} -> c0 + c1 n^-p."""
    if isinstance(value, dict):
        unknown = set(value) - {"const", "coef", "power"}
        if unknown:
            raise ModelError(f"{name}: unknown keys {sorted(unknown)}")
        c0 = float(value.get("const", 0.0))
        c1 = float(value.get("coef", 0.0))
        p = float(value.get("power", 1.0))
        return Coefficient(
            func=lambda n: c0 + c1 * np.asarray(n, dtype=float) ** (-p), name=name
        )
    if isinstance(value, (list, tuple)):
        return as_coefficient(value, name, start=n0 - 1)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return _const(value, name)
    raise ModelError(f"{name}: expected a number, a list or an object, got {type(value).__name__}")


def model_from_config(cfg: dict) -> CoefficientModel:
    """Build a model from ``{"family": ..., "params": {...}, "n0": int}``.

    Table configs carry ``"a"`` and ``"b"`` arrays (indices n0-1, n0, ...),
    either at top level or inside ``params``.
    """
    if not isinstance(cfg, dict):
        raise ModelError("model config must be a JSON object")
    family = cfg.get("family")
    params = cfg.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ModelError("params: expected an object")
    n0 = cfg.get("n0")
    if n0 is not None and (not isinstance(n0, int) or n0 < 1):
        raise ModelError("n0: expected an integer >= 1")

    def need(key):
        if key not in params:
            raise ModelError(f"params.{key}: missing for family {family!r}")
        return params[key]

    if family == "kneser":
        c = need("c")
        if not isinstance(c, (int, float)):
            raise ModelError("params.c: expected a number")
        return kneser_family(float(c))
    if family == "loglog":
        k, c = need("k"), params.get("c", 0.0)
        if not isinstance(k, int) or k < 0:
            raise ModelError("params.k: expected a non-negative integer")
        if not isinstance(c, (int, float)):
            raise ModelError("params.c: expected a number")
        return loglog_family(k, float(c))
    if family == "variable_a":
        start = 1 if n0 is None else n0
        a = _expr(need("a"), "a", start)
        b = _expr(params["b"], "b", start) if "b" in params else None
        db = _expr(params["db"], "b-b0", start) if "db" in params else None
        model = variable_a_family(a, b, db=db, n0=start)
        return replace(model, config=cfg)
    if family == "table":
        start = 1 if n0 is None else n0
        src = params if "a" in params else cfg
        if "a" not in src or "b" not in src:
            raise ModelError("table: arrays 'a' and 'b' are required")
        a, b = src["a"], src["b"]
        if not isinstance(a, list) or not isinstance(b, list):
            raise ModelError("table: 'a' and 'b' must be arrays")
        model = table_model(a, b, n0=start, b0=src.get("b0"), u0=src.get("u0"))
        return replace(model, config=cfg)
    raise ModelError(f"family: expected one of kneser, loglog, variable_a, table; got {family!r}")

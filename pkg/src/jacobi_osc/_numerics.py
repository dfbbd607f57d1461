"""Small numeric helpers shared by the modules: index-addressed series and
compensated prefix sums."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Series:
    """A real (or complex) sequence stored for consecutive indices ``start, start+1, ...``."""

    start: int
    values: np.ndarray

    @property
    def stop(self) -> int:
        """Last index held (inclusive)."""
        return self.start + len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n):
        if isinstance(n, (int, np.integer)):
            if not self.start <= n <= self.stop:
                raise IndexError(f"index {n} outside [{self.start}, {self.stop}]")
            return self.values[n - self.start]
        n = np.asarray(n)
        if n.size and (n.min() < self.start or n.max() > self.stop):
            raise IndexError(f"indices outside [{self.start}, {self.stop}]")
        return self.values[n - self.start]

    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.stop + 1)

    def window(self, m: int, M: int) -> np.ndarray:
        """Values for indices ``m..M`` inclusive."""
        if m < self.start or M > self.stop or m > M:
            raise IndexError(f"window [{m}, {M}] outside [{self.start}, {self.stop}]")
        return self.values[m - self.start : M - self.start + 1]


def compensated_cumsum(terms) -> np.ndarray:
    """Prefix sums ``[0, t0, t0+t1, ...]`` with Neumaier error compensation.

    The returned array has ``len(terms) + 1`` entries.
    """
    out = [0.0]
    s = 0.0
    comp = 0.0
    for t in np.asarray(terms, dtype=float).tolist():
        new = s + t
        if abs(s) >= abs(t):
            comp += (s - new) + t
        else:
            comp += (t - new) + s
        s = new
        out.append(s + comp)
    return np.array(out)


def compensated_cumsum_complex(terms) -> np.ndarray:
    terms = np.asarray(terms, dtype=complex)
    return compensated_cumsum(terms.real) + 1j * compensated_cumsum(terms.imag)


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal; locale independent."""
    return repr(float(x))

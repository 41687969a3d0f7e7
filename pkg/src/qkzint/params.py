"""Global parameter set and point generation helpers.

All modules share one immutable :class:`ParameterSet` holding the scalars

    q               deformation parameter, |q| < 1 (default regime: real, 0 < q < 1)
    k               level, k > -2
    p = q^(2(k+2))  elliptic nome, |p| < 1
    s = 1/(2(k+2))  exponent unit, so p**s == q
    m               nonnegative integer highest-weight label
    n               number of tensor factors
    l               screening count, 0 <= l <= n
    kappa = q^(2l-2-n-2m)   multiplier entering the difference equation

plus the two tolerances used everywhere: ``eps_trunc`` for infinite-product
truncation and ``eps_check`` for verification comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ParameterSet:
    q: complex = 0.6
    k: float = 1.0
    m: int = 0
    n: int = 1
    l: int = 0
    eps_trunc: float = 1e-16
    eps_check: float = 1e-12
    # derived, filled in __post_init__
    p: complex = field(init=False)
    s: float = field(init=False)
    kappa: complex = field(init=False)

    def __post_init__(self) -> None:
        q = self.q
        if np.imag(q) == 0:
            q = float(np.real(q))
            object.__setattr__(self, "q", q)
        if not (0 < abs(q) < 1):
            raise ValueError(f"need 0 < |q| < 1, got q={q!r}")
        if not self.k > -2:
            raise ValueError(f"need k > -2, got k={self.k!r}")
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if not (0 <= self.l <= self.n):
            raise ValueError("l must satisfy 0 <= l <= n")
        if self.m < 0:
            raise ValueError("m must be a nonnegative integer")
        if self.eps_trunc <= 0 or self.eps_check <= 0:
            raise ValueError("tolerances must be positive")
        p = q ** (2.0 * (self.k + 2.0))
        if not abs(p) < 1:
            raise ValueError(f"need |p| < 1, got |p|={abs(p)!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", 1.0 / (2.0 * (self.k + 2.0)))
        object.__setattr__(self, "kappa", q ** (2 * self.l - 2 - self.n - 2 * self.m))

    @property
    def default_regime(self) -> bool:
        """True when q is real in (0,1) and p is real positive.

        In this regime every real power x**c used by the package is
        single-valued under p-shifts (no branch cut is ever crossed).
        """
        return (
            np.imag(self.q) == 0
            and 0 < np.real(self.q) < 1
            and np.imag(self.p) == 0
            and np.real(self.p) > 0
        )

    def with_sector(self, n: int, l: int, m: int | None = None) -> "ParameterSet":
        """Copy with a different (n, l[, m]); q, k and tolerances are kept."""
        return ParameterSet(
            q=self.q,
            k=self.k,
            m=self.m if m is None else m,
            n=n,
            l=l,
            eps_trunc=self.eps_trunc,
            eps_check=self.eps_check,
        )

    def summary(self) -> dict:
        return {
            "q": _c2pair(self.q),
            "k": self.k,
            "m": self.m,
            "n": self.n,
            "l": self.l,
            "p": _c2pair(self.p),
            "s": self.s,
            "kappa": _c2pair(self.kappa),
            "eps_trunc": self.eps_trunc,
            "eps_check": self.eps_check,
        }


def _c2pair(x) -> list:
    x = complex(x)
    return [x.real, x.imag]


def unit_circle_points(n: int, seed: int, min_gap: float = 0.3) -> np.ndarray:
    """n points on the unit circle with pairwise phase gaps >= min_gap.

    Sampling is rejection-based and fully determined by the seed; the gap
    condition is enforced cyclically (first vs last as well).
    """
    if n * min_gap >= 2 * np.pi:
        raise ValueError("min_gap too large for n points on the circle")
    rng = np.random.default_rng(seed)
    for _ in range(100_000):
        phases = np.sort(rng.uniform(0.0, 2 * np.pi, size=n))
        if n == 1:
            return np.exp(1j * phases)
        gaps = np.diff(phases, append=phases[0] + 2 * np.pi)
        if np.min(gaps) >= min_gap:
            return np.exp(1j * phases)
    raise RuntimeError("could not draw phase-separated points")

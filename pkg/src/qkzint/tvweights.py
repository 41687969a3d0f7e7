"""The hypergeometric weight function and the phase function.

For a component with support {i | bit_i = 1} = {k_1 < ... < k_l} the weight
function is

    w(t, z) = prod_{a<b} (t_a - t_b)/(q^-2 t_a - t_b)
              * sum over injective assignments (a_1, ..., a_l) of {1..l} of
                prod_i [ t_{a_i}/(t_{a_i} - q^-1 z_{k_i})
                         * prod_{j<k_i} (q^-1 t_{a_i} - z_j)/(t_{a_i} - q^-1 z_j) ]
                * prod_{i<j} (q^-2 t_{a_i} - t_{a_j})/(t_{a_i} - t_{a_j})

with the sum enumerated exactly over all l! permutations. The phase function
is the Pochhammer-product kernel

    Phi(t, z) = prod_{i,a} (q t_a/z_i; p)_oo / (q^-1 t_a/z_i; p)_oo
                * prod_{a<b} (q^-2 t_a/t_b; p)_oo / (q^2 t_a/t_b; p)_oo.

Both accept ndarray-valued t entries and broadcast (used by the contour
quadrature); every denominator is guarded against near-vanishing before use.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .exceptions import GenericPositionError
from .params import ParameterSet
from .qseries import qpochhammer
from .spinchain import SpinConfig

_GENERIC_TOL = 1e-10


@dataclass(frozen=True)
class PointConfig:
    """Evaluation points: z (length n), t (length l), optional u (length l)."""

    z: np.ndarray
    t: tuple = ()
    u: tuple | None = None

    def __post_init__(self) -> None:
        z = np.asarray(self.z, dtype=complex)
        if z.ndim != 1:
            raise ValueError("z must be a 1-d array")
        if np.any(z == 0):
            raise ValueError("z entries must be nonzero")
        for i in range(len(z)):
            for j in range(i + 1, len(z)):
                if abs(z[i] - z[j]) < _GENERIC_TOL * (abs(z[i]) + abs(z[j])):
                    raise GenericPositionError(f"coincident z_{i+1} = z_{j+1}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", tuple(self.t))
        if self.u is not None:
            object.__setattr__(self, "u", tuple(self.u))

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def l(self) -> int:
        return len(self.t)


def _guard(den, x, y, what: str):
    """Reject denominators below 1e-10 of their local scale."""
    scale = np.abs(x) + np.abs(y)
    if np.any(np.abs(den) < _GENERIC_TOL * scale):
        raise GenericPositionError(f"denominator {what} vanishes")
    return den


def weight_function(cfg: SpinConfig, pts: PointConfig, ps: ParameterSet):
    """Weight function for a support-of-ones component label."""
    if cfg.marked != 1:
        raise ValueError("weight_function expects a support-of-ones SpinConfig")
    if cfg.n != pts.n:
        raise ValueError("cfg and pts disagree on n")
    support = cfg.support
    l = len(support)
    if len(pts.t) != l:
        raise ValueError(f"need {l} t-variables, got {len(pts.t)}")
    if l == 0:
        return 1.0 + 0.0j
    q = ps.q
    t = pts.t
    z = pts.z

    pref = 1.0 + 0.0j
    for a in range(l):
        for b in range(a + 1, l):
            den = _guard(t[a] / q**2 - t[b], t[a] / q**2, t[b], "q^-2 t_a - t_b")
            pref = pref * (t[a] - t[b]) / den

    total = 0.0 + 0.0j
    for assign in permutations(range(l)):
        term = 1.0 + 0.0j
        for i in range(l):
            ta = t[assign[i]]
            ki = support[i]
            den = _guard(ta - z[ki - 1] / q, ta, z[ki - 1] / q, "t - q^-1 z_k")
            term = term * ta / den
            for j in range(1, ki):
                den = _guard(ta - z[j - 1] / q, ta, z[j - 1] / q, "t - q^-1 z_j")
                term = term * (ta / q - z[j - 1]) / den
        for i in range(l):
            for j in range(i + 1, l):
                ti, tj = t[assign[i]], t[assign[j]]
                den = _guard(ti - tj, ti, tj, "t_a - t_b")
                term = term * (ti / q**2 - tj) / den
        total = total + term
    return pref * total


def phase_function(pts: PointConfig, ps: ParameterSet):
    """Phase function Phi(t, z); equals 1 for l = 0."""
    q, p, eps = ps.q, ps.p, ps.eps_trunc
    t = pts.t
    z = pts.z
    res = 1.0 + 0.0j
    for a in range(len(t)):
        for i in range(len(z)):
            x = t[a] / z[i]
            num = qpochhammer(q * x, p, eps=eps)
            den = qpochhammer(x / q, p, eps=eps)
            scale = np.maximum(1.0, np.abs(num))
            if np.any(np.abs(den) < 1e-12 * scale):
                raise GenericPositionError("phase-function pole (q^-1 t/z on p^-N)")
            res = res * num / den
    for a in range(len(t)):
        for b in range(a + 1, len(t)):
            x = t[a] / t[b]
            num = qpochhammer(x / q**2, p, eps=eps)
            den = qpochhammer(q**2 * x, p, eps=eps)
            scale = np.maximum(1.0, np.abs(num))
            if np.any(np.abs(den) < 1e-12 * scale):
                raise GenericPositionError("phase-function pole (q^2 t_a/t_b on p^-N)")
            res = res * num / den
    return res

"""q-series special functions with controlled truncation.

Everything here is an infinite product evaluated with an analytic geometric
tail bound: the single q-Pochhammer symbol

    (z; x)_oo = prod_{j>=0} (1 - x^j z),          |x| < 1,

its double analogue

    (z; x1, x2)_oo = prod_{i,j>=0} (1 - x1^i x2^j z),

the multiplicative theta function

    theta(z) = (z; p)_oo (p/z; p)_oo (p; p)_oo,

which obeys theta(p z) = -theta(z)/z and theta(1/z) = -theta(z)/z, and the
three derived ratios used by the rest of the package:

    xi(z)  = (p/z; p, q^4)_oo (p q^4/z; p, q^4)_oo / (p q^2/z; p, q^4)_oo^2
    rho(z) = q^(1/2) (1/z; q^4)_oo (q^4/z; q^4)_oo / (q^2/z; q^4)_oo^2
    c_factor(z) = (q^-2 z; p)_oo / (q^2 z; p)_oo

xi satisfies the shift identity xi(p z)/xi(z) = rho(z)/q^(1/2); the squared
denominator of xi is required for that identity to hold.

All functions are pure, accept scalar or ndarray ``z`` (scalar in, scalar
out) and are safe to call concurrently.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import PoleEvaluationError
from .params import ParameterSet

_MAX_FACTORS = 200_000


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _num_factors(zmax: float, ax: float, eps: float) -> int:
    """Smallest N with ax^N * zmax / (1 - ax) < eps (at least 1)."""
    if zmax == 0.0:
        return 0
    if ax == 0.0:
        return 1
    bound = eps * (1.0 - ax) / zmax
    if bound >= 1.0:
        return 1
    n = int(math.ceil(math.log(bound) / math.log(ax))) + 1
    if n > _MAX_FACTORS:
        raise PoleEvaluationError(
            f"q-Pochhammer truncation needs {n} factors (|x|={ax} too close to 1)"
        )
    return max(n, 1)


def qpochhammer(z, x, *, eps: float = 1e-16, n_factors: int | None = None):
    """(z; x)_oo truncated at the smallest N with |x|^N |z|/(1-|x|) < eps.

    ``n_factors`` overrides the automatic truncation length (used by the
    truncation-soundness tests). Rejects |x| >= 1.
    """
    x = complex(x)
    ax = abs(x)
    if ax >= 1.0:
        raise ValueError(f"divergent product: need |x| < 1, got |x|={ax}")
    arr, scalar = _as_complex_array(z)
    zmax = float(np.max(np.abs(arr))) if arr.size else 0.0
    n = _num_factors(zmax, ax, eps) if n_factors is None else n_factors
    res = np.ones_like(arr)
    pw = 1.0 + 0.0j
    for _ in range(n):
        res = res * (1.0 - pw * arr)
        pw *= x
    return complex(res) if scalar else res


def qpochhammer_double(z, x1, x2, *, eps: float = 1e-16):
    """(z; x1, x2)_oo with rectangular truncation.

    Evaluated as prod_{i>=0} (x1^i z; x2)_oo; the outer index is truncated
    by the same geometric bound as :func:`qpochhammer`. Rejects |x1| >= 1
    or |x2| >= 1.
    """
    x1 = complex(x1)
    x2 = complex(x2)
    ax1, ax2 = abs(x1), abs(x2)
    if ax1 >= 1.0 or ax2 >= 1.0:
        raise ValueError("divergent product: need |x1| < 1 and |x2| < 1")
    arr, scalar = _as_complex_array(z)
    zmax = float(np.max(np.abs(arr))) if arr.size else 0.0
    # outer tail: sum_{i>=N} |x1|^i |z| / ((1-|x1|)(1-|x2|))
    n_outer = _num_factors(zmax / max(1.0 - ax2, 1e-300), ax1, 0.1 * eps)
    res = np.ones_like(arr)
    pw = 1.0 + 0.0j
    for _ in range(n_outer):
        res = res * qpochhammer(pw * arr, x2, eps=0.1 * eps)
        pw *= x1
    return complex(res) if scalar else res


def theta(z, p, *, eps: float = 1e-16):
    """theta(z) = (z; p)_oo (p/z; p)_oo (p; p)_oo. Rejects z = 0."""
    arr, scalar = _as_complex_array(z)
    if np.any(arr == 0):
        raise ValueError("theta requires z != 0")
    res = (
        qpochhammer(arr, p, eps=eps)
        * qpochhammer(p / arr, p, eps=eps)
        * qpochhammer(p, p, eps=eps)
    )
    return complex(res) if scalar else res


def _guarded_ratio(num, den, what: str):
    scale = np.maximum(1.0, np.abs(num))
    if np.any(np.abs(den) < 1e-13 * scale):
        raise PoleEvaluationError(f"evaluation at a pole of {what}")
    return num / den


def xi(z, ps: ParameterSet):
    """Double-Pochhammer ratio entering adjacent vertex-operator prefactors.

    xi(z) = (p/z; p, q^4)_oo (p q^4/z; p, q^4)_oo / (p q^2/z; p, q^4)_oo^2.
    Rejects z = 0.
    """
    arr, scalar = _as_complex_array(z)
    if np.any(arr == 0):
        raise ValueError("xi requires z != 0")
    p, q4, eps = ps.p, ps.q**4, ps.eps_trunc
    num = qpochhammer_double(p / arr, p, q4, eps=eps) * qpochhammer_double(
        p * q4 / arr, p, q4, eps=eps
    )
    den = qpochhammer_double(p * ps.q**2 / arr, p, q4, eps=eps) ** 2
    res = _guarded_ratio(num, den, "xi")
    return complex(res) if scalar else res


def rho(z, ps: ParameterSet):
    """Scalar factor normalizing the spin-flipped R-matrix.

    rho(z) = q^(1/2) (1/z; q^4)_oo (q^4/z; q^4)_oo / (q^2/z; q^4)_oo^2.
    Rejects z = 0; has a double pole at z = q^(2+4j), j >= 0.
    """
    arr, scalar = _as_complex_array(z)
    if np.any(arr == 0):
        raise ValueError("rho requires z != 0")
    q, eps = ps.q, ps.eps_trunc
    q4 = q**4
    num = qpochhammer(1.0 / arr, q4, eps=eps) * qpochhammer(q4 / arr, q4, eps=eps)
    den = qpochhammer(q**2 / arr, q4, eps=eps) ** 2
    res = (q ** 0.5 if np.imag(q) == 0 else complex(q) ** 0.5) * _guarded_ratio(
        num, den, "rho"
    )
    return complex(res) if scalar else res


def c_factor(z, ps: ParameterSet):
    """Pochhammer ratio in the screening-screening contraction.

    c_factor(z) = (q^-2 z; p)_oo / (q^2 z; p)_oo, with poles where the
    denominator vanishes (q^2 z on p^(-j), j >= 0).
    """
    arr, scalar = _as_complex_array(z)
    q, p, eps = ps.q, ps.p, ps.eps_trunc
    num = qpochhammer(arr / q**2, p, eps=eps)
    den = qpochhammer(arr * q**2, p, eps=eps)
    res = _guarded_ratio(num, den, "c_factor")
    return complex(res) if scalar else res

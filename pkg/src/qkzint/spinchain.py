"""Vectors in (C^2)^(tensor n) and the R-matrix leg actions.

Basis ordering is lexicographic: the component (nu_1, ..., nu_n) sits at
index sum_i nu_i 2^(n-i), i.e. leg 1 is the most significant bit.

The R-matrix acts on a pair of legs (i first slot, j second slot) as

    R(z) (v_e  x v_e)  = v_e x v_e
    R(z) (v_0  x v_1)  = q(1-z)/(1-q^2 z) v_0 x v_1 + (1-q^2)/(1-q^2 z) v_1 x v_0
    R(z) (v_1  x v_0)  = z(1-q^2)/(1-q^2 z) v_0 x v_1 + q(1-z)/(1-q^2 z) v_1 x v_0

R(1) is exactly the permutation of the two legs, and the action conserves
the number of 1-spins. Leg actions are implemented by axis manipulation on
the 2 x ... x 2 coefficient tensor; no 2^n x 2^n matrix is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .exceptions import PoleEvaluationError
from .params import ParameterSet
from .qseries import rho


@dataclass(frozen=True)
class SpinVector:
    n: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.shape != (2**self.n,):
            raise ValueError(f"coeffs must have length 2^{self.n}")
        object.__setattr__(self, "coeffs", arr.copy())

    @classmethod
    def zero(cls, n: int) -> "SpinVector":
        return cls(n, np.zeros(2**n, dtype=complex))

    @classmethod
    def basis(cls, bits) -> "SpinVector":
        bits = tuple(int(b) for b in bits)
        v = np.zeros(2 ** len(bits), dtype=complex)
        v[bits_to_index(bits)] = 1.0
        return cls(len(bits), v)

    def component(self, bits) -> complex:
        return complex(self.coeffs[bits_to_index(tuple(bits))])

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __add__(self, other: "SpinVector") -> "SpinVector":
        return SpinVector(self.n, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpinVector") -> "SpinVector":
        return SpinVector(self.n, self.coeffs - other.coeffs)

    def scaled(self, c: complex) -> "SpinVector":
        return SpinVector(self.n, c * self.coeffs)

    def sector_mass(self, ones: int) -> float:
        """Sup-norm of the coefficients in the sector with `ones` 1-spins."""
        idx = [bits_to_index(b) for b in sector_bits(self.n, ones)]
        return float(np.max(np.abs(self.coeffs[idx])))


def bits_to_index(bits) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    return idx


def index_to_bits(idx: int, n: int) -> tuple:
    return tuple((idx >> (n - 1 - i)) & 1 for i in range(n))


def sector_bits(n: int, ones: int) -> list:
    """All bit tuples of length n with the given number of ones (lex order)."""
    out = []
    for pos in combinations(range(n), ones):
        bits = [0] * n
        for i in pos:
            bits[i] = 1
        out.append(tuple(bits))
    out.sort()
    return out


@dataclass(frozen=True)
class SpinConfig:
    """A component label with its support positions (1-based, sorted).

    ``marked`` records which bit value the support tracks: the weight
    function uses configurations with support {i | bit_i = 1}, the
    free-field component formulas use {i | bit_i = 0}.
    """

    n: int
    bits: tuple
    marked: int

    def __post_init__(self) -> None:
        if self.marked not in (0, 1):
            raise ValueError("marked must be 0 or 1")
        if len(self.bits) != self.n or any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be a 0/1 tuple of length n")

    @classmethod
    def from_ones(cls, bits) -> "SpinConfig":
        bits = tuple(int(b) for b in bits)
        return cls(len(bits), bits, 1)

    @classmethod
    def from_zeros(cls, bits) -> "SpinConfig":
        bits = tuple(int(b) for b in bits)
        return cls(len(bits), bits, 0)

    @property
    def support(self) -> tuple:
        return tuple(i + 1 for i, b in enumerate(self.bits) if b == self.marked)

    @property
    def l(self) -> int:
        return len(self.support)

    def flipped(self) -> "SpinConfig":
        """Bit-flipped configuration with the complementary convention.

        The support positions are preserved: flipping (bits, marked) to
        (1-bits, 1-marked) tracks the same index set.
        """
        return SpinConfig(self.n, tuple(1 - b for b in self.bits), 1 - self.marked)


def _check_legs(n: int, *legs: int) -> None:
    if len(set(legs)) != len(legs):
        raise ValueError("legs must be distinct")
    for leg in legs:
        if not 1 <= leg <= n:
            raise ValueError(f"leg {leg} out of range 1..{n}")


def r_apply(z: complex, i: int, j: int, v: SpinVector, ps: ParameterSet) -> SpinVector:
    """Apply R(z) on legs (i, j) of v; identity on all other legs."""
    _check_legs(v.n, i, j)
    q = ps.q
    den = 1.0 - q**2 * z
    if abs(den) < 1e-13 * max(1.0, abs(q**2 * z)):
        raise PoleEvaluationError(f"R-matrix pole at z = q^-2 (z={z!r})")
    b = q * (1.0 - z) / den
    c_from01 = (1.0 - q**2) / den
    c_from10 = z * (1.0 - q**2) / den
    arr = v.coeffs.reshape((2,) * v.n)
    moved = np.moveaxis(arr, (i - 1, j - 1), (0, 1)).copy()
    a01 = moved[0, 1].copy()
    a10 = moved[1, 0].copy()
    moved[0, 1] = b * a01 + c_from10 * a10
    moved[1, 0] = c_from01 * a01 + b * a10
    out = np.moveaxis(moved, (0, 1), (i - 1, j - 1))
    return SpinVector(v.n, np.ascontiguousarray(out).reshape(-1))


def flip_legs(v: SpinVector, legs) -> SpinVector:
    """Apply the bit-flip C (C v_e = v_(1-e)) on the given legs."""
    _check_legs(v.n, *legs)
    mask = 0
    for leg in legs:
        mask |= 1 << (v.n - leg)
    idx = np.arange(2**v.n)
    return SpinVector(v.n, v.coeffs[idx ^ mask])


def flip_all(v: SpinVector) -> SpinVector:
    return flip_legs(v, tuple(range(1, v.n + 1)))


def rhat_apply(z: complex, i: int, j: int, v: SpinVector, ps: ParameterSet) -> SpinVector:
    """Apply rho(z) * C^(x2) R(z) C^(x2) on legs (i, j)."""
    w = flip_legs(v, (i, j))
    w = r_apply(z, i, j, w, ps)
    w = flip_legs(w, (i, j))
    return w.scaled(rho(z, ps))


def kappa_apply(kappa: complex, j: int, v: SpinVector) -> SpinVector:
    """Multiply each basis coefficient by kappa^(bit_j)."""
    _check_legs(v.n, j)
    idx = np.arange(2**v.n)
    bit = (idx >> (v.n - j)) & 1
    factors = np.where(bit == 1, complex(kappa), 1.0 + 0.0j)
    return SpinVector(v.n, v.coeffs * factors)


def permutation_apply(i: int, j: int, v: SpinVector) -> SpinVector:
    """Swap legs i and j (test oracle for R(1))."""
    _check_legs(v.n, i, j)
    arr = v.coeffs.reshape((2,) * v.n)
    out = np.swapaxes(arr, i - 1, j - 1)
    return SpinVector(v.n, np.ascontiguousarray(out).reshape(-1))

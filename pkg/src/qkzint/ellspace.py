"""Structured gauge functions and the exact p-shift multiplier calculus.

An element W of the gauge space is stored structurally as

    W(t, z) = constant * prod_a t_a^power_t[a] * prod_j z_j^power_z[j]
              * prod over theta-atoms of theta(c * prod t^alpha * prod z^beta)^(+-1)

with integer atom exponents. The mandatory skeleton is always present:
denominator atoms theta(q t_a / z_j) for all (a, j) and the pair ratio
theta(t_a/t_b) / theta(q^-2 t_a/t_b) for a < b.

Shift multipliers (T W)/W under t_a -> p t_a or z_j -> p z_j are computed
exactly from

    theta(p^N x) = (-1)^N p^(-N(N-1)/2) x^(-N) theta(x),      N integer,

so the result is a scalar times an integer-exponent monomial in (t, z); the
monomial is reported as-is when it does not cancel. The membership
conditions require

    T^t_a W / W = kappa q^(n - 2l + 4a - 2)     for every a,
    T^z_j W / W = q^(-l)                        for every j,

as exact scalars. ``solve_default_w`` builds the family

    Theta = prod_{a,j} theta(c_j t_a / z_j),   prod_j c_j = kappa^(-1),
    Y     = prod_j z_j^beta_j,                 beta_j = -s l log_q(c_j),

which satisfies both conditions identically; with all c_j equal this is
c = kappa^(-1/n) and beta = s l (2l - 2 - n - 2m)/n. When kappa^(-1/n)
lands on q p^Z the skeleton denominators are cancelled by the new atoms and
the resulting integrand loses all its interior poles (the integral
representation collapses to zero); the ``z_splay`` knob spreads the c_j
(keeping their product fixed) to sidestep that degeneracy for n >= 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import PoleEvaluationError
from .params import ParameterSet
from .qseries import theta
from .tvweights import PointConfig


@dataclass(frozen=True)
class ThetaAtom:
    constant: complex
    t_exp: tuple
    z_exp: tuple
    numerator: bool = True

    def __post_init__(self) -> None:
        t_exp = tuple(int(e) for e in self.t_exp)
        z_exp = tuple(int(e) for e in self.z_exp)
        object.__setattr__(self, "t_exp", t_exp)
        object.__setattr__(self, "z_exp", z_exp)
        total = sum(abs(e) for e in t_exp) + sum(abs(e) for e in z_exp)
        if total not in (1, 2):
            raise ValueError("atom argument must involve one or two variables")

    def argument(self, pts: PointConfig):
        val = self.constant
        for a, e in enumerate(self.t_exp):
            if e:
                val = val * pts.t[a] ** e
        for j, e in enumerate(self.z_exp):
            if e:
                val = val * pts.z[j] ** e
        return val


@dataclass(frozen=True)
class StructuredW:
    n: int
    l: int
    constant: complex
    power_t: tuple
    power_z: tuple
    atoms: tuple

    def __post_init__(self) -> None:
        if len(self.power_t) != self.l or len(self.power_z) != self.n:
            raise ValueError("power vectors must have lengths l and n")
        object.__setattr__(self, "power_t", tuple(float(x) for x in self.power_t))
        object.__setattr__(self, "power_z", tuple(float(x) for x in self.power_z))
        object.__setattr__(self, "atoms", tuple(self.atoms))


@dataclass(frozen=True)
class ShiftRatio:
    """Exact (T W)/W: a scalar times a monomial prod t^t_exp prod z^z_exp."""

    scalar: complex
    t_exp: tuple
    z_exp: tuple

    @property
    def is_constant(self) -> bool:
        return all(e == 0 for e in self.t_exp) and all(e == 0 for e in self.z_exp)


def _unit(length: int, pos: int) -> tuple:
    e = [0] * length
    e[pos] = 1
    return tuple(e)


def skeleton_atoms(n: int, l: int, q: complex) -> list:
    atoms = []
    for a in range(l):
        for j in range(n):
            t_exp = _unit(l, a)
            z_exp = tuple(-x for x in _unit(n, j))
            atoms.append(ThetaAtom(q, t_exp, z_exp, numerator=False))
    for a in range(l):
        for b in range(a + 1, l):
            diff = tuple(x - y for x, y in zip(_unit(l, a), _unit(l, b)))
            zeros = (0,) * n
            atoms.append(ThetaAtom(1.0, diff, zeros, numerator=True))
            atoms.append(ThetaAtom(q**-2, diff, zeros, numerator=False))
    return atoms


def has_skeleton(w: StructuredW, ps: ParameterSet) -> bool:
    needed = skeleton_atoms(w.n, w.l, ps.q)
    pool = list(w.atoms)
    for atom in needed:
        if atom in pool:
            pool.remove(atom)
        else:
            return False
    return True


def solve_default_w(ps: ParameterSet, *, z_splay: float = 1.0) -> StructuredW:
    """Default gauge element realizing the membership conditions exactly.

    ``z_splay`` = 1 gives the symmetric choice c_j = kappa^(-1/n) for all j;
    other values multiply c_j by z_splay^((2j - n - 1)/2), which keeps
    prod_j c_j = kappa^(-1) and therefore both shift conditions.
    """
    n, l = ps.n, ps.l
    kappa = ps.kappa
    if abs(np.imag(kappa)) > 1e-14 * abs(kappa) or np.real(kappa) <= 0:
        raise ValueError("kappa must be real positive (principal-branch regime)")
    if z_splay <= 0:
        raise ValueError("z_splay must be real positive")
    if l == 0:
        return StructuredW(n, 0, 1.0, (), (0.0,) * n, ())
    c0 = float(np.real(kappa)) ** (-1.0 / n)
    cs = [c0 * z_splay ** ((2 * (j + 1) - n - 1) / 2.0) for j in range(n)]
    lnq = math.log(float(np.real(ps.q)))
    betas = tuple(-ps.s * l * math.log(cj) / lnq for cj in cs)
    atoms = skeleton_atoms(n, l, ps.q)
    for a in range(l):
        for j in range(n):
            t_exp = _unit(l, a)
            z_exp = tuple(-x for x in _unit(n, j))
            atoms.append(ThetaAtom(cs[j], t_exp, z_exp, numerator=True))
    return StructuredW(n, l, 1.0, (0.0,) * l, betas, tuple(atoms))


def is_degenerate_default(ps: ParameterSet) -> bool:
    """True when the symmetric default family collapses (c on q p^Z).

    Then every skeleton denominator theta(q t_a/z_j) is cancelled by a
    numerator atom and the solution integrals vanish identically.
    """
    if ps.l == 0:
        return False
    c = float(np.real(ps.kappa)) ** (-1.0 / ps.n)
    q = float(np.real(ps.q))
    p = float(np.real(ps.p))
    r = math.log(c / q) / math.log(p)
    return abs(r - round(r)) < 1e-9


def shift_multiplier(w: StructuredW, kind: str, index: int, ps: ParameterSet) -> ShiftRatio:
    """Exact (T W)/W for t_index -> p t_index or z_index -> p z_index (1-based)."""
    p = ps.p
    l, n = w.l, w.n
    if kind == "t":
        if not 1 <= index <= l:
            raise ValueError("t index out of range")
        scalar = p ** w.power_t[index - 1]
    elif kind == "z":
        if not 1 <= index <= n:
            raise ValueError("z index out of range")
        scalar = p ** w.power_z[index - 1]
    else:
        raise ValueError("kind must be 't' or 'z'")
    t_acc = [0] * l
    z_acc = [0] * n
    for atom in w.atoms:
        N = atom.t_exp[index - 1] if kind == "t" else atom.z_exp[index - 1]
        if N == 0:
            continue
        # theta(p^N x)/theta(x) = (-1)^N p^(-N(N-1)/2) x^(-N)
        factor = (-1.0) ** N * p ** (-N * (N - 1) // 2) * atom.constant ** (-N)
        sgn = 1 if atom.numerator else -1
        scalar = scalar * (factor if atom.numerator else 1.0 / factor)
        for a, e in enumerate(atom.t_exp):
            t_acc[a] += sgn * (-N) * e
        for j, e in enumerate(atom.z_exp):
            z_acc[j] += sgn * (-N) * e
    return ShiftRatio(complex(scalar), tuple(t_acc), tuple(z_acc))


def eval_w(w: StructuredW, pts: PointConfig, ps: ParameterSet):
    """Numeric value of W at (t, z); principal branch for the real powers."""
    if pts.n != w.n or len(pts.t) != w.l:
        raise ValueError("point configuration does not match W")
    val = complex(w.constant)
    for a in range(w.l):
        if w.power_t[a] != 0.0:
            val = val * pts.t[a] ** w.power_t[a]
    for j in range(w.n):
        if w.power_z[j] != 0.0:
            val = val * pts.z[j] ** w.power_z[j]
    for atom in w.atoms:
        th = theta(atom.argument(pts), ps.p, eps=ps.eps_trunc)
        if atom.numerator:
            val = val * th
        else:
            if np.any(np.abs(th) < 1e-13):
                raise PoleEvaluationError("theta zero in a denominator of W")
            val = val / th
    return val


@dataclass(frozen=True)
class ConditionsReport:
    ok: bool
    t_multipliers: tuple
    z_multipliers: tuple
    failures: tuple


def check_conditions(w: StructuredW, ps: ParameterSet, *, rel_tol: float = 1e-12) -> ConditionsReport:
    """Verify gauge-space membership: skeleton, t-symmetry, shift conditions."""
    failures = []
    if not has_skeleton(w, ps):
        failures.append("skeleton atoms missing")
    if not _theta_part_symmetric(w, ps):
        failures.append("Theta part not symmetric under t-permutations")
    q, kappa = ps.q, ps.kappa
    t_mults = []
    for a in range(1, w.l + 1):
        ratio = shift_multiplier(w, "t", a, ps)
        expected = kappa * q ** (w.n - 2 * w.l + 4 * a - 2)
        t_mults.append(ratio.scalar)
        if not ratio.is_constant:
            failures.append(f"T^t_{a} W/W is not constant: {ratio}")
        elif abs(ratio.scalar - expected) > rel_tol * abs(expected):
            failures.append(f"T^t_{a} W/W = {ratio.scalar}, expected {expected}")
    z_mults = []
    for j in range(1, w.n + 1):
        ratio = shift_multiplier(w, "z", j, ps)
        expected = q ** (-w.l)
        z_mults.append(ratio.scalar)
        if not ratio.is_constant:
            failures.append(f"T^z_{j} W/W is not constant: {ratio}")
        elif abs(ratio.scalar - expected) > rel_tol * abs(expected):
            failures.append(f"T^z_{j} W/W = {ratio.scalar}, expected {expected}")
    return ConditionsReport(not failures, tuple(t_mults), tuple(z_mults), tuple(failures))


def _theta_part_symmetric(w: StructuredW, ps: ParameterSet) -> bool:
    """Atoms beyond the skeleton plus t-powers symmetric under t-swap."""
    extra = list(w.atoms)
    for atom in skeleton_atoms(w.n, w.l, ps.q):
        if atom in extra:
            extra.remove(atom)
    if len(set(w.power_t)) > 1:
        return False
    key = lambda atom: (atom.numerator, atom.z_exp, atom.t_exp, complex(atom.constant).real, complex(atom.constant).imag)
    base = sorted(extra, key=key)
    for a in range(w.l):
        for b in range(a + 1, w.l):
            swapped = []
            for atom in extra:
                te = list(atom.t_exp)
                te[a], te[b] = te[b], te[a]
                swapped.append(ThetaAtom(atom.constant, tuple(te), atom.z_exp, atom.numerator))
            if sorted(swapped, key=key) != base:
                return False
    return True


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def w_to_dict(w: StructuredW) -> dict:
    return {
        "n": w.n,
        "l": w.l,
        "constant": [complex(w.constant).real, complex(w.constant).imag],
        "power_t": list(w.power_t),
        "power_z": list(w.power_z),
        "atoms": [
            {
                "constant": [complex(a.constant).real, complex(a.constant).imag],
                "t_exp": list(a.t_exp),
                "z_exp": list(a.z_exp),
                "numerator": a.numerator,
            }
            for a in w.atoms
        ],
    }


def w_from_dict(d: dict) -> StructuredW:
    atoms = tuple(
        ThetaAtom(
            complex(a["constant"][0], a["constant"][1]),
            tuple(a["t_exp"]),
            tuple(a["z_exp"]),
            bool(a["numerator"]),
        )
        for a in d["atoms"]
    )
    return StructuredW(
        int(d["n"]),
        int(d["l"]),
        complex(d["constant"][0], d["constant"][1]),
        tuple(d["power_t"]),
        tuple(d["power_z"]),
        atoms,
    )


def w_to_json(w: StructuredW) -> str:
    return json.dumps(w_to_dict(w), indent=2, sort_keys=True)


def w_from_json(text: str) -> StructuredW:
    return w_from_dict(json.loads(text))

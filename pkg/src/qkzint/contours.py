"""Deformed-torus contours and high-accuracy circle quadrature.

A contour for one integration variable is realized as a positively oriented
base circle plus small residue-correction circles: a +1 circle wraps a point
that must be enclosed but lies outside the base circle, a -1 circle excises
a point that must stay outside but lies inside it. The trapezoid rule on a
circle is spectrally accurate for integrands meromorphic in an annulus
around it, and each correction circle is exact by the residue theorem up to
the same spectral error.

For the t-variables the separation requirements are, for variable t_a,

    inside:  p^s q^-1 z_j  (s >= 0)  and  p^s q^2 t_b      (s >= 0, b > a)
    outside: p^-s q z_j    (s >= 0)  and  p^-s q^-2 t_b    (s >= 0, b > a),

so the contour of t_a depends on where the later variables sit. The
quadrature therefore iterates with t_l outermost; at each inner level the
t_b-relative points are tested against the base radius for the *current*
outer node values and corrections are inserted on the fly (they are only
needed when an outer variable sits on one of its own correction circles).

For the single u-variable (screening-current integrals at l = 1) the
requirements are: q^(k+3) z_j and q^(-mu(k+2)) t_a inside, q^(k+1) z_j
outside. For mu = +1 the t-point lies far outside the base circle and gets
a +1 correction circle.

Weights absorb the measure: ``measure="dt/t"`` integrates f dt/(2 pi i t),
``measure="dt"`` integrates f dt/(2 pi i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContourError
from .params import ParameterSet

_RADIAL_MARGIN = 1.25  # wrong-side test: |x| > margin*r or < r/margin, else error


@dataclass(frozen=True)
class Correction:
    variable: int  # 0-based
    center: complex
    radius: float
    orientation: int  # +1 enclose, -1 excise


@dataclass(frozen=True)
class PairRule:
    """Relational separation rule between variable a and later variables b > a.

    Point families: inside p^s*inside_factor*t_b, outside p^-s*outside_factor*t_b.
    """

    inside_factor: complex
    outside_factor: complex
    step: float


@dataclass(frozen=True)
class ContourPlan:
    num_vars: int
    radii: tuple
    corrections: tuple
    nodes: int
    correction_radius_factor: float
    pair_rule: PairRule | None = None
    singular_points: tuple = field(default=())
    windows: tuple = field(default=())


def _family_points(base: complex, step: float, lo: float, hi: float) -> list:
    """base * step^s for s >= 0 while the radius stays in [lo, hi]."""
    out = []
    x = complex(base)
    for _ in range(200):
        r = abs(x)
        if r < lo:
            break
        if r <= hi:
            out.append(x)
        x = x * step
    return out


def _inv_family_points(base: complex, step: float, lo: float, hi: float) -> list:
    """base * step^-s for s >= 0 while the radius stays in [lo, hi]."""
    out = []
    x = complex(base)
    for _ in range(200):
        r = abs(x)
        if r > hi:
            break
        if r >= lo:
            out.append(x)
        x = x / step
    return out


def _classify(points: list, r: float, must: str, label: str) -> list:
    """Return corrections needed for `points` against base radius r.

    must="inside": points must be enclosed -> +1 circle when |x| > r.
    must="outside": points must be excluded -> -1 circle when |x| < r.
    Points too close to the circle itself are rejected.
    """
    out = []
    for x in points:
        ax = abs(x)
        if r / _RADIAL_MARGIN <= ax <= r * _RADIAL_MARGIN:
            raise ContourError(
                f"{label} point at radius {ax:.6g} too close to base circle {r:.6g}"
            )
        if must == "inside" and ax > r:
            out.append((x, +1))
        elif must == "outside" and ax < r:
            out.append((x, -1))
    return out


def _correction_radius(center: complex, others: list, cap: float) -> float:
    dist = min(
        (abs(center - o) for o in others if abs(center - o) > 0), default=math.inf
    )
    radius = min(cap, dist / 2.5)
    if not radius > 0:
        raise ContourError("degenerate correction radius")
    if dist < 2 * radius:
        raise ContourError("correction pole too close to another singularity")
    return radius


def t_contour_plan(
    ps: ParameterSet,
    z: np.ndarray,
    *,
    nodes: int = 256,
    correction_radius_factor: float = 0.3,
) -> ContourPlan:
    """Contours for the l t-variables given the z configuration.

    Base radius: geometric midpoint of the separation window, sqrt(p) for
    unit-modulus z (requires k > -1 so that p q^-1 < q). Corrections wrap
    the inside points p^s q^-1 z_j that exceed the base radius (s = 0 for
    unit z) and excise outside points p^-s q z_j that fall below it (occurs
    for shifted coordinates |z_j| = p).
    """
    if not ps.default_regime:
        raise ContourError("contours require the default regime (q, p real in (0,1))")
    z = np.asarray(z, dtype=complex)
    q = float(np.real(ps.q))
    p = float(np.real(ps.p))
    if not p / q < q:
        raise ContourError(f"empty contour window: need p q^-1 < q (k > -1), k={ps.k}")
    l = ps.l
    r = math.sqrt(p)
    if l == 0:
        return ContourPlan(0, (), (), nodes, correction_radius_factor)

    inside_pts: list = []
    outside_pts: list = []
    for zj in z:
        inside_pts += _family_points(zj / q, p, r / 200.0, 200.0 * r)
        outside_pts += _inv_family_points(q * zj, p, r / 200.0, 200.0 * r)
    singular = inside_pts + outside_pts

    needed = _classify(inside_pts, r, "inside", "t-plan inside") + _classify(
        outside_pts, r, "outside", "t-plan outside"
    )
    corrections = []
    for var in range(l):
        for center, orient in needed:
            radius = _correction_radius(center, singular, correction_radius_factor * r)
            corrections.append(Correction(var, center, radius, orient))
    rule = PairRule(q**2, q**-2.0, p) if l >= 2 else None
    return ContourPlan(
        l,
        (r,) * l,
        tuple(corrections),
        nodes,
        correction_radius_factor,
        pair_rule=rule,
        singular_points=tuple(singular),
        windows=((p / q, q),) * l,
    )


def u_contour_plan(
    ps: ParameterSet,
    z: np.ndarray,
    t: np.ndarray,
    mu: int,
    *,
    nodes: int = 256,
    correction_radius_factor: float = 0.3,
) -> ContourPlan:
    """Single-variable contour for the screening-current integral (l = 1).

    For l >= 2 the nested window has ratio exactly q^2 and admits no circle
    family; those integrals are evaluated by their residue closed form.
    """
    if not ps.default_regime:
        raise ContourError("contours require the default regime (q, p real in (0,1))")
    if mu not in (+1, -1):
        raise ContourError("mu must be +1 or -1")
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=complex)
    if t.size > 1:
        raise ContourError("direct u-quadrature is restricted to one u variable (l = 1)")
    q = float(np.real(ps.q))
    k = ps.k
    hi = q ** (k + 3) * float(np.max(np.abs(z)))
    lo = q ** (k + 1) * float(np.min(np.abs(z)))
    if not hi < lo:
        raise ContourError("empty u-contour window")
    r = math.sqrt(hi * lo)

    inside_pts = [q ** (k + 3) * zj for zj in z]
    inside_pts += [q ** (-mu * (k + 2)) * ta for ta in t]
    outside_pts = [q ** (k + 1) * zj for zj in z]
    singular = inside_pts + outside_pts

    needed = _classify(inside_pts, r, "inside", "u-plan inside") + _classify(
        outside_pts, r, "outside", "u-plan outside"
    )
    corrections = [
        Correction(0, center, _correction_radius(center, singular, correction_radius_factor * r), orient)
        for center, orient in needed
    ]
    return ContourPlan(
        1,
        (r,),
        tuple(corrections),
        nodes,
        correction_radius_factor,
        singular_points=tuple(singular),
        windows=((hi, lo),),
    )


def _variable_nodes(plan: ContourPlan, var: int, extra, measure: str):
    """Quadrature nodes and weights for one variable (base + corrections)."""
    r = plan.radii[var]
    m = plan.nodes
    mc = max(plan.nodes // 4, 16)
    frac = (var + 1.0) / (plan.num_vars + 2.0)  # stagger per variable
    ang = 2.0 * np.pi * (np.arange(m) + frac) / m
    pts = r * np.exp(1j * ang)
    if measure == "dt/t":
        wts = np.full(m, 1.0 / m, dtype=complex)
    elif measure == "dt":
        wts = pts / m
    else:
        raise ValueError("measure must be 'dt/t' or 'dt'")
    points = [pts]
    weights = [wts]
    corrs = [c for c in plan.corrections if c.variable == var] + list(extra)
    for c in corrs:
        ang = 2.0 * np.pi * (np.arange(mc) + frac) / mc
        cpts = c.center + c.radius * np.exp(1j * ang)
        if measure == "dt/t":
            cwts = c.orientation * (cpts - c.center) / (cpts * mc)
        else:
            cwts = c.orientation * (cpts - c.center) / mc
        points.append(cpts)
        weights.append(cwts)
    return np.concatenate(points), np.concatenate(weights)


def _relational_corrections(plan: ContourPlan, var: int, fixed: dict) -> list:
    """Corrections for variable `var` induced by fixed outer values t_b, b > var."""
    rule = plan.pair_rule
    if rule is None or not fixed:
        return []
    r = plan.radii[var]
    cap = plan.correction_radius_factor * r
    others = list(plan.singular_points)
    for b, tb in fixed.items():
        others.append(rule.inside_factor * tb)
        others.append(rule.outside_factor * tb)
    out = []
    for b, tb in sorted(fixed.items()):
        inside = _family_points(rule.inside_factor * tb, rule.step, r / 200.0, 200.0 * r)
        outside = _inv_family_points(rule.outside_factor * tb, rule.step, r / 200.0, 200.0 * r)
        for center, orient in _classify(inside, r, "inside", "pair inside") + _classify(
            outside, r, "outside", "pair outside"
        ):
            radius = _correction_radius(center, [o for o in others if o != center], cap)
            out.append(Correction(var, center, radius, orient))
    return out


def integrate(plan: ContourPlan, f, *, measure: str = "dt/t") -> complex:
    """Iterated contour quadrature of f over the plan.

    f receives a tuple (t_1, ..., t_l); the innermost entry is an ndarray of
    nodes, the outer entries are scalars. Summation order is fixed
    (ascending node index, outer levels descending), so results are
    deterministic for identical inputs.
    """
    lvars = plan.num_vars
    if lvars == 0:
        return complex(f(()))

    def recurse(level: int, fixed: dict) -> complex:
        extra = _relational_corrections(plan, level, fixed)
        pts, wts = _variable_nodes(plan, level, extra, measure)
        if level == 0:
            tvec = [None] * lvars
            tvec[0] = pts
            for b, vb in fixed.items():
                tvec[b] = vb
            vals = np.asarray(f(tuple(tvec)), dtype=complex)
            if not np.all(np.isfinite(vals)):
                bad = pts[~np.isfinite(vals)][0]
                raise ContourError(f"non-finite integrand sample at t={bad!r}")
            return complex(np.sum(wts * vals))
        total = 0.0 + 0.0j
        for idx in range(len(pts)):
            inner = dict(fixed)
            inner[level] = complex(pts[idx])
            total += wts[idx] * recurse(level - 1, inner)
        return total

    return recurse(lvars - 1, {})

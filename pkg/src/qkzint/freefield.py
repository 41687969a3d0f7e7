"""Closed-form screened correlation quantities and OPE prefactors.

Component labels here carry the support {i | nu_i = 0} = {k_1 < ... < k_l}.
Sign vectors: eps_a = +-1 are the screening signs (one per t_a), mu_i = +-1
the current signs (one per auxiliary u_i).

The u-dependent kernel (five product groups, all index ranges as printed):

    u_kernel = prod_i u_i (z_{k_i} - q^(mu_i-2-k) u_i)
                        / ((z_{k_i} - q^(-1-k) u_i)(u_i - q^(k+3) z_{k_i}))
             * prod_j prod_{i<k_j} (z_i - q^(mu_j-2-k) u_j)/(z_i - q^(-1-k) u_j)
             * prod_j prod_{i>k_j} (u_j - q^(k+2-mu_j) z_i)/(u_j - q^(k+3) z_i)
             * prod_{i<j} (u_i - q^(mu_i-mu_j) u_j)/(u_i - q^(-2) u_j)
             * prod_{i,a} (u_i - q^(-mu_i(k+1)-eps_a) t_a)/(u_i - q^(-mu_i(k+2)) t_a)

and u_kernel_full multiplies in prod_{a<b} (q^eps_b t_b - q^eps_a t_a)/(t_b - q^-2 t_a).

The u-contour integrals prod_i du_i/(2 pi i u_i) of u_kernel evaluate in
closed form by residues: with A = {j | mu_j = -} = {l_1 < ... < l_r},

    u_integral_closed = (-q^-2)^r (q - q^-1)^r
        * sum over injective (a_1..a_r) in {1..l} of
            prod_i delta(eps_{a_i} = +)
          * prod_i t_{a_i} / (z_{k_{l_i}} - q t_{a_i})
          * prod_j prod_{i < k_{l_j}} (z_i - q^-1 t_{a_j})/(z_i - q t_{a_j})
          * prod_i prod_{a not in {a_i..a_r}} (t_{a_i} - q^(-1-eps_a) t_a)/(t_{a_i} - t_a),

where the exclusion set of the i-th factor is {a_i, a_{i+1}, ..., a_r}.
Summing (prod_a eps_a) * u_integral_closed * tail over all 2^l screening
signs gives screening_sign_sum, which vanishes unless mu = (-, ..., -) and
then equals

    weight_reduction = q^(-2l + l(l-1)/2 - sum k_i) (q - q^-1)^l * w

evaluated at the bit-flipped component. The full component closed form is

    correlation_component = (-1)^l q^E prod_i z_i^(s(m+n-l-i)) prod_{i<j} xi(z_i/z_j)
                            * prod_a t_a^(2s(2a-2-m)-1) * Phi * w_flip,
    E = -(n+m+2-2l) l + k s n (m+n-l) - k s n (n+1)/2 + 4 s l (m-l+1).

Everything is evaluated by direct product/sum enumeration (l! and 2^l
terms); "equals zero" assertions downstream are scaled by the maximum
summand magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from .exceptions import GenericPositionError
from .params import ParameterSet
from .qseries import c_factor, qpochhammer, xi
from .spinchain import SpinConfig
from .tvweights import PointConfig, phase_function, weight_function

_GENERIC_TOL = 1e-10


@dataclass(frozen=True)
class ScreenSignConfig:
    eps: tuple
    mu: tuple

    def __post_init__(self) -> None:
        eps = tuple(int(e) for e in self.eps)
        mu = tuple(int(x) for x in self.mu)
        if any(e not in (1, -1) for e in eps) or any(x not in (1, -1) for x in mu):
            raise ValueError("signs must be +1 or -1")
        if len(eps) != len(mu):
            raise ValueError("need r+ + r- = l: eps and mu must both have length l")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "mu", mu)

    @property
    def l(self) -> int:
        return len(self.eps)

    @property
    def a_minus(self) -> tuple:
        """Positions with mu = -, 1-based, ascending."""
        return tuple(i + 1 for i, x in enumerate(self.mu) if x == -1)


def _div(num, den, what: str):
    scale = np.abs(num) + np.abs(den)
    if np.any(np.abs(den) < _GENERIC_TOL * np.maximum(scale, 1e-30)):
        raise GenericPositionError(f"denominator {what} vanishes")
    return num / den


def _require_zeros_support(cfg: SpinConfig) -> tuple:
    if cfg.marked != 0:
        raise ValueError("free-field components use support-of-zeros SpinConfig")
    return cfg.support


def u_kernel(nu: SpinConfig, sc: ScreenSignConfig, pts: PointConfig, ps: ParameterSet):
    """The u-dependent rational kernel (five product groups)."""
    support = _require_zeros_support(nu)
    l = len(support)
    if sc.l != l or pts.u is None or len(pts.u) != l or len(pts.t) != l:
        raise ValueError("inconsistent l between nu, signs and points")
    q, k = ps.q, ps.k
    z, t, u = pts.z, pts.t, pts.u
    mu, eps = sc.mu, sc.eps
    val = 1.0 + 0.0j
    for i in range(l):
        zk = z[support[i] - 1]
        num = u[i] * (zk - q ** (mu[i] - 2 - k) * u[i])
        den1 = zk - q ** (-1 - k) * u[i]
        den2 = u[i] - q ** (k + 3) * zk
        val = val * _div(num, den1 * den2, "commutator pair")
    for j in range(l):
        for i in range(1, support[j]):
            zi = z[i - 1]
            val = val * _div(
                zi - q ** (mu[j] - 2 - k) * u[j],
                zi - q ** (-1 - k) * u[j],
                "left z-u pair",
            )
    for j in range(l):
        for i in range(support[j] + 1, pts.n + 1):
            zi = z[i - 1]
            val = val * _div(
                u[j] - q ** (k + 2 - mu[j]) * zi,
                u[j] - q ** (k + 3) * zi,
                "right u-z pair",
            )
    for i in range(l):
        for j in range(i + 1, l):
            val = val * _div(
                u[i] - q ** (mu[i] - mu[j]) * u[j],
                u[i] - q ** (-2) * u[j],
                "u-u pair",
            )
    for i in range(l):
        for a in range(l):
            val = val * _div(
                u[i] - q ** (-mu[i] * (k + 1) - eps[a]) * t[a],
                u[i] - q ** (-mu[i] * (k + 2)) * t[a],
                "u-t pair",
            )
    return val


def eps_tail(eps: tuple, t: tuple, ps: ParameterSet):
    """prod_{a<b} (q^eps_b t_b - q^eps_a t_a) / (t_b - q^-2 t_a)."""
    q = ps.q
    val = 1.0 + 0.0j
    for a in range(len(t)):
        for b in range(a + 1, len(t)):
            val = val * _div(
                q ** eps[b] * t[b] - q ** eps[a] * t[a],
                t[b] - q ** (-2) * t[a],
                "t_b - q^-2 t_a",
            )
    return val


def u_kernel_full(nu: SpinConfig, sc: ScreenSignConfig, pts: PointConfig, ps: ParameterSet):
    return u_kernel(nu, sc, pts, ps) * eps_tail(sc.eps, pts.t, ps)


def vertex_prefactor(nu: SpinConfig, mu: tuple, pts: PointConfig, ps: ParameterSet):
    """Scalar prefactor collecting the vertex-operator zero modes."""
    support = _require_zeros_support(nu)
    l = len(support)
    q, k, s, m, n = ps.q, ps.k, ps.s, ps.m, ps.n
    z, t = pts.z, pts.t
    expo = sum((n + m - 2 * l - support[i] + (i + 1)) * mu[i] for i in range(l))
    val = (1 - q**2) ** l * q**expo
    for i in range(1, n + 1):
        val = val * (q**k * z[i - 1]) ** (s * (m + n - l - i))
    for i in range(n):
        for j in range(i + 1, n):
            val = val * xi(z[i] / z[j], ps)
    for a in range(1, l + 1):
        val = val * (q ** (-2) * t[a - 1]) ** (4 * s * (a - 1) - 2 * m * s)
    return val


def u_integral_closed(nu: SpinConfig, sc: ScreenSignConfig, pts: PointConfig, ps: ParameterSet):
    """Residue closed form of the u-contour integrals of u_kernel."""
    support = _require_zeros_support(nu)
    l = len(support)
    if sc.l != l or len(pts.t) != l:
        raise ValueError("inconsistent l between nu, signs and points")
    q = ps.q
    z, t = pts.z, pts.t
    eps = sc.eps
    a_minus = sc.a_minus  # 1-based positions l_1 < ... < l_r
    r = len(a_minus)
    pref = (-(q ** (-2))) ** r * (q - q ** (-1)) ** r
    total = 0.0 + 0.0j
    for assign in permutations(range(l), r):
        if any(eps[assign[i]] != 1 for i in range(r)):
            continue
        term = 1.0 + 0.0j
        for i in range(r):
            ta = t[assign[i]]
            zk = z[support[a_minus[i] - 1] - 1]
            term = term * _div(ta, zk - q * ta, "z_k - q t")
        for j in range(r):
            ta = t[assign[j]]
            for i in range(1, support[a_minus[j] - 1]):
                zi = z[i - 1]
                term = term * _div(zi - ta / q, zi - q * ta, "z_i - q t")
        for i in range(r):
            excluded = set(assign[i:])
            ta = t[assign[i]]
            for a in range(l):
                if a in excluded:
                    continue
                term = term * _div(
                    ta - q ** (-1 - eps[a]) * t[a], ta - t[a], "t_a - t_b"
                )
        total = total + term
    return pref * total


def screening_sign_sum(nu: SpinConfig, mu: tuple, pts: PointConfig, ps: ParameterSet):
    """Sign-weighted sum over all 2^l screening-sign vectors (closed forms)."""
    l = len(_require_zeros_support(nu))
    total = 0.0 + 0.0j
    for eps in product((1, -1), repeat=l):
        sc = ScreenSignConfig(eps, tuple(mu))
        sign = 1
        for e in eps:
            sign *= e
        total = total + sign * u_integral_closed(nu, sc, pts, ps) * eps_tail(
            eps, pts.t, ps
        )
    return total


def screening_sign_sum_scale(nu: SpinConfig, mu: tuple, pts: PointConfig, ps: ParameterSet) -> float:
    """Max summand magnitude of screening_sign_sum (cancellation scale)."""
    l = len(_require_zeros_support(nu))
    best = 0.0
    for eps in product((1, -1), repeat=l):
        sc = ScreenSignConfig(eps, tuple(mu))
        mag = float(
            np.max(np.abs(u_integral_closed(nu, sc, pts, ps) * eps_tail(eps, pts.t, ps)))
        )
        best = max(best, mag)
    return best


def weight_reduction(nu: SpinConfig, pts: PointConfig, ps: ParameterSet):
    """q-power times (q - q^-1)^l times the weight function of the flip."""
    support = _require_zeros_support(nu)
    l = len(support)
    q = ps.q
    expo = -2 * l + l * (l - 1) / 2.0 - sum(support)
    return (
        q**expo
        * (q - q ** (-1)) ** l
        * weight_function(nu.flipped(), pts, ps)
    )


def correlation_exponent(ps: ParameterSet) -> float:
    """E in the closed form of the correlation component."""
    n, m, l, k, s = ps.n, ps.m, ps.l, ps.k, ps.s
    return (
        -(n + m + 2 - 2 * l) * l
        + k * s * n * (m + n - l)
        - 0.5 * k * s * n * (n + 1)
        + 4 * s * l * (m - l + 1)
    )


def correlation_component(nu: SpinConfig, pts: PointConfig, ps: ParameterSet):
    """Closed form of the highest-to-highest correlation component."""
    support = _require_zeros_support(nu)
    l = len(support)
    if l != ps.l or nu.n != ps.n:
        raise ValueError("nu must match (n, l) of the parameter set")
    q, s, m, n = ps.q, ps.s, ps.m, ps.n
    z, t = pts.z, pts.t
    val = (-1.0) ** l * q ** correlation_exponent(ps)
    for i in range(1, n + 1):
        val = val * z[i - 1] ** (s * (m + n - l - i))
    for i in range(n):
        for j in range(i + 1, n):
            val = val * xi(z[i] / z[j], ps)
    for a in range(1, l + 1):
        val = val * t[a - 1] ** (2 * s * (2 * a - 2 - m) - 1)
    return val * phase_function(pts, ps) * weight_function(nu.flipped(), pts, ps)


def assembled_component(nu: SpinConfig, pts: PointConfig, ps: ParameterSet):
    """Definitional assembly of the component from its sign-sum pieces.

    (-1)^l (q-q^-1)^(-2l) prod_a t_a^-1 * Phi
        * sum_mu (prod_i mu_i) vertex_prefactor * screening_sign_sum.
    """
    l = len(_require_zeros_support(nu))
    q = ps.q
    val = (-1.0) ** l * (q - q ** (-1)) ** (-2 * l)
    for ta in pts.t:
        val = val / ta
    val = val * phase_function(pts, ps)
    acc = 0.0 + 0.0j
    for mu in product((1, -1), repeat=l):
        sign = 1
        for x in mu:
            sign *= x
        acc = acc + sign * vertex_prefactor(nu, mu, pts, ps) * screening_sign_sum(
            nu, mu, pts, ps
        )
    return val * acc


def alternating_sign_sum(t, q):
    """sum over sign vectors of prod_j eps_j prod_{i>j} (q^eps_i t_i - q^eps_j t_j).

    Returns (sum, max summand magnitude); the sum is identically zero.
    """
    t = np.asarray(t, dtype=complex)
    n = len(t)
    total = 0.0 + 0.0j
    scale = 0.0
    for eps in product((1, -1), repeat=n):
        sign = 1
        for e in eps:
            sign *= e
        term = 1.0 + 0.0j
        for i in range(n):
            for j in range(i):
                term = term * (q ** eps[i] * t[i] - q ** eps[j] * t[j])
        total += sign * term
        scale = max(scale, abs(term))
    return total, scale


# ---------------------------------------------------------------------------
# OPE prefactors (pairwise contraction scalars)
# ---------------------------------------------------------------------------

OPE_KINDS = ("ss", "phi_s", "js", "phi_j", "j_phi", "qcomm", "jj", "phi_phi")


def ope_prefactor(kind: str, args: tuple, signs: tuple, ps: ParameterSet):
    """Scalar prefactor of one pairwise operator product.

    kind/args/signs:
      "ss":      (t1, t2), (eps1, eps2)   screening x screening
      "phi_s":   (z, t),   (eps,)         vertex x screening
      "js":      (u, t),   (mu, eps)      current x screening
      "phi_j":   (z, u),   (mu,)          vertex x current (left product)
      "j_phi":   (u, z),   (mu,)          current x vertex (right product)
      "qcomm":   (z, u),   (mu,)          q-commutator combination
      "jj":      (u1, u2), (mu1, mu2)     current x current
      "phi_phi": (z1, z2), ()             vertex x vertex

    Evaluated as printed (rational/product expressions continue outside
    their convergence regions); poles raise.
    """
    q, k, s, p, eps_t = ps.q, ps.k, ps.s, ps.p, ps.eps_trunc
    if kind == "ss":
        t1, t2 = args
        e1, e2 = signs
        return (
            (q ** (-2) * t1) ** (4 * s)
            * q**e1
            * _div(t1 - q ** (e2 - e1) * t2, t1 - q ** (-2) * t2, "t1 - q^-2 t2")
            * c_factor(t2 / t1, ps)
        )
    if kind == "phi_s":
        z, t = args
        return (
            (q**k * z) ** (-s)
            * qpochhammer(q * t / z, p, eps=eps_t)
            / qpochhammer(t / (q * z), p, eps=eps_t)
        )
    if kind == "js":
        u, t = args
        mu, e = signs
        return q ** (-mu) * _div(
            u - q ** (-mu * (k + 1) - e) * t,
            u - q ** (-mu * (k + 2)) * t,
            "u - q^(-mu(k+2)) t",
        )
    if kind == "phi_j":
        z, u = args
        (mu,) = signs
        return _div(
            z - q ** (mu - 2 - k) * u, z - q ** (-1 - k) * u, "z - q^(-1-k) u"
        )
    if kind == "j_phi":
        u, z = args
        (mu,) = signs
        return q**mu * _div(
            u - q ** (k + 2 - mu) * z, u - q ** (k + 3) * z, "u - q^(k+3) z"
        )
    if kind == "qcomm":
        z, u = args
        (mu,) = signs
        num = (1 - q**2) * u * (z - q ** (mu - 2 - k) * u)
        den = (z - q ** (-1 - k) * u) * (u - q ** (k + 3) * z)
        return _div(num, den, "q-commutator denominator")
    if kind == "jj":
        u1, u2 = args
        mu1, mu2 = signs
        return q ** (-mu1) * _div(
            u1 - q ** (mu1 - mu2) * u2, u1 - q ** (-2) * u2, "u1 - q^-2 u2"
        )
    if kind == "phi_phi":
        z1, z2 = args
        return (q**k * z1) ** s * xi(z1 / z2, ps)
    raise ValueError(f"unknown OPE kind {kind!r}; one of {OPE_KINDS}")

"""Continued fractions and verified integer searches on the circle.

All predicates have the form ``|e^{2 pi i t} - e^{2 pi i s}| < eps`` for some
integer combination ``t`` of the irrational parameters.  Searches return the
smallest admissible integer and every result is re-checked in high-precision
arithmetic before it is handed back.

Irrational inputs are given as strings (``"sqrt(2)-1"``), mpmath numbers,
floats or Fractions.  Strings are re-evaluated at whatever precision a search
needs, so large integers never outrun the working precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import mpmath
import numpy as np
import sympy

DEFAULT_DPS = 50
DEFAULT_BUDGET = 10 ** 6


class BudgetError(RuntimeError):
    """A search exhausted its budget; ``best`` holds the closest residuals seen."""

    def __init__(self, message: str, best: dict | None = None):
        super().__init__(message)
        self.best = best or {}


class VerificationError(AssertionError):
    """A returned integer failed its defining inequality on re-check."""


# -- real numbers at chosen precision -----------------------------------------

class Scaled:
    """Lazy ``factor * base`` so the product is formed at the working precision."""

    def __init__(self, base, factor: int):
        self.base, self.factor = base, factor


def scaled(theta, factor: int):
    if isinstance(theta, Fraction):
        return theta * factor
    return Scaled(theta, factor)


def real_value(theta: Any, dps: int = DEFAULT_DPS) -> mpmath.mpf:
    """``theta`` as an mpmath number carrying ``dps`` significant digits."""
    if isinstance(theta, Scaled):
        extra = len(str(abs(theta.factor)))
        with mpmath.workdps(dps + extra):
            return real_value(theta.base, dps + extra) * theta.factor
    with mpmath.workdps(dps):
        if isinstance(theta, Fraction):
            return mpmath.mpf(theta.numerator) / theta.denominator
        if isinstance(theta, (int, float, mpmath.mpf)):
            return mpmath.mpf(theta)
        if isinstance(theta, str):
            if "/" in theta and all(part.strip().lstrip("-").isdigit()
                                    for part in theta.split("/")):
                return real_value(Fraction(theta), dps)
            expr = sympy.sympify(theta)
        else:
            expr = sympy.sympify(theta)
        return mpmath.mpf(str(sympy.N(expr, dps + 10)))


def describe(theta: Any) -> str:
    if isinstance(theta, Fraction):
        return f"{theta.numerator}/{theta.denominator}"
    return str(theta)


def _frac_part_dist(t: mpmath.mpf) -> mpmath.mpf:
    """Distance from ``t`` to the nearest integer."""
    f = t - mpmath.floor(t)
    return min(f, 1 - f)


def chord(t: mpmath.mpf) -> mpmath.mpf:
    """``|e^{2 pi i t} - 1|``."""
    return 2 * abs(mpmath.sin(mpmath.pi * _frac_part_dist(t)))


def chord_threshold(eps) -> mpmath.mpf:
    """Largest open distance ``delta`` with ``||t|| < delta  <=>  chord(t) < eps``."""
    eps = real_value(eps, mpmath.mp.dps) if isinstance(eps, Fraction) else mpmath.mpf(eps)
    if eps >= 2:
        return mpmath.mpf("0.5")
    return mpmath.asin(eps / 2) / mpmath.pi


# -- continued fractions ----------------------------------------------------------

@dataclass(frozen=True)
class Convergent:
    p: int
    q: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


def _partial_quotients(theta, count: int, dps: int) -> tuple[list[int], bool]:
    """Leading partial quotients and whether the expansion terminated exactly."""
    if isinstance(theta, Fraction):
        out, x = [], theta
        while len(out) < count:
            a = math.floor(x)
            out.append(a)
            if x == a:
                return out, True
            x = 1 / (x - a)
        return out, False
    with mpmath.workdps(dps):
        x = real_value(theta, dps)
        out = []
        q_prev, q = 0, 1
        while len(out) < count:
            a = int(mpmath.floor(x))
            out.append(a)
            q_prev, q = q, a * q + q_prev
            if x == a:
                return out, True
            # stop before the expansion outruns the working precision
            if q * q > mpmath.mpf(10) ** (dps - 10):
                return out, False
            x = 1 / (x - a)
        return out, False


def cf_convergents(theta, count: int, dps: int = DEFAULT_DPS) -> list[Convergent]:
    """Continued-fraction convergents of ``theta`` with strictly increasing denominators.

    When two consecutive convergents share a denominator (leading partial
    quotient 1) only the later, closer one is kept.  Rational input stops at
    the exact fraction.  Precision is raised as needed to deliver ``count``
    convergents.
    """
    while True:
        aq, exact = _partial_quotients(theta, count + 1, dps)
        convs: list[Convergent] = []
        p0, q0, p1, q1 = 1, 0, aq[0], 1
        for i, a in enumerate(aq):
            if i:
                p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
            c = Convergent(p1, q1)
            if convs and convs[-1].q == c.q:
                convs[-1] = c
            else:
                convs.append(c)
        if len(convs) >= count or exact or dps > 4000:
            return convs[:count]
        dps *= 2


# -- first-hit search ---------------------------------------------------------------

def _min_x(a: int, m: int, lo: int, hi: int) -> int | None:
    """Smallest ``x >= 0`` with ``lo <= (a x) mod m <= hi`` (``0 <= lo <= hi < m``)."""
    frames = []
    while True:
        a %= m
        if lo == 0:
            res = 0
            break
        if a == 0:
            return None
        if 2 * a > m:
            # (m - a) x = -(a x) mod m; lo >= 1 keeps zero out of the image
            a, lo, hi = m - a, m - hi, m - lo
        x = -(-lo // a)
        if a * x <= hi:
            res = x
            break
        frames.append((a, m, lo))
        a, m, lo, hi = (-m) % a, a, lo % a, hi % a
    for a, m, lo in reversed(frames):
        res = -(-(m * res + lo) // a)
    return res


def _scaled(alpha, beta, dps):
    """Integer model ``(A, B, M)`` with ``alpha ~ A/M`` and ``beta ~ B/M``."""
    if isinstance(alpha, Fraction) and isinstance(beta, Fraction):
        M = alpha.denominator * beta.denominator // math.gcd(alpha.denominator,
                                                             beta.denominator)
        return int(alpha * M), int(beta * M), M, True
    M = 10 ** dps
    with mpmath.workdps(dps + 20):
        A = int(mpmath.floor(real_value(alpha, dps + 20) * M))
        B = int(mpmath.floor(real_value(beta, dps + 20) * M))
    return A, B, M, False


def first_hit(alpha, beta, delta, start: int = 1, dps: int = DEFAULT_DPS,
              limit: int | None = None) -> int | None:
    """Smallest ``q >= start`` with ``||q alpha - beta|| < delta``.

    ``alpha`` and ``beta`` may be Fractions (exact search) or anything
    :func:`real_value` accepts.  Returns ``None`` if no ``q <= limit`` exists.
    """
    if not isinstance(delta, Fraction):
        delta = mpmath.mpf(delta)
    q = start
    while True:
        A, B, M, exact = _scaled(alpha, beta, dps)
        with mpmath.workdps(dps + 20):
            if exact and isinstance(delta, Fraction):
                W = math.ceil(delta * M) - 1
            elif exact:
                W = int(mpmath.ceil(delta * M)) - 1
            else:
                W = int(mpmath.floor(delta * M)) - 2 * (q + 2) - 2
        if W < 0:
            dps += 20
            continue
        C = (A * q - B) % M
        lo = (-W - C) % M
        pieces = [(lo, lo + 2 * W)] if lo + 2 * W < M else [(lo, M - 1), (0, lo + 2 * W - M)]
        hits = [t for t in (_min_x(A % M, M, a, b) for a, b in pieces) if t is not None]
        if not hits:
            return None
        cand = q + min(hits)
        if limit is not None and cand > limit:
            return cand
        if exact:
            # the integer model is the exact orbit, so the hit needs no re-check
            return cand
        # the integer model must be accurate at this size; otherwise retry finer
        if not exact and (cand + 2) * mpmath.mpf(10) ** (-dps) * 1e6 > delta:
            dps = dps + int(math.log10(cand + 2)) + 20
            continue
        with mpmath.workdps(dps + int(math.log10(cand + 2)) + 20):
            t = cand * real_value(alpha, mpmath.mp.dps) - real_value(beta, mpmath.mp.dps)
            ok = _frac_part_dist(t) < delta
        if ok:
            return cand
        q = cand + 1


def _work_dps(*ints: int, base: int = DEFAULT_DPS) -> int:
    digits = sum(len(str(abs(int(v)))) for v in ints)
    return max(base, digits + 30)


def residual(theta, k: int, target=0, dps: int | None = None) -> float:
    """``|e^{2 pi i (k theta)} - e^{2 pi i target}|`` evaluated in high precision."""
    dps = dps or _work_dps(k)
    with mpmath.workdps(dps):
        t = k * real_value(theta, dps) - real_value(target, dps)
        return float(chord(t))


# -- approximation searches ------------------------------------------------------

def find_kn(theta, eps, budget: int = DEFAULT_BUDGET, dps: int = DEFAULT_DPS) -> int:
    """Smallest ``k >= 1`` with ``|e^{2 pi i k theta} - 1| < eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    with mpmath.workdps(dps):
        delta = chord_threshold(eps)
    k = first_hit(theta, Fraction(0), delta, start=1, dps=dps, limit=budget)
    if k is None or k > budget:
        raise BudgetError(f"no k <= {budget} with chord < {eps}",
                          {"first_candidate": k})
    r = residual(theta, k)
    if not r < eps:
        raise VerificationError(f"k={k} gives residual {r} >= {eps}")
    return k


def find_pair_equidist(theta, gamma, eps, budget: int = DEFAULT_BUDGET,
                       chunk: int = 1 << 16) -> int:
    """Smallest ``k <= budget`` with ``|e^{2 pi i k gamma} - 1| < eps`` and
    ``|e^{2 pi i k theta} - e^{2 pi i theta}| < eps``.

    A float64 sweep proposes candidates with a safety margin; each candidate
    is confirmed in high precision before it is accepted.
    """
    th = float(real_value(theta, 30))
    ga = float(real_value(gamma, 30))
    margin = max(1e-9, budget * 4e-16)
    with mpmath.workdps(30):
        delta = float(chord_threshold(eps))
    best = {"k": None, "residual_gamma": math.inf, "residual_theta": math.inf}
    for start in range(1, budget + 1, chunk):
        k = np.arange(start, min(start + chunk, budget + 1), dtype=np.float64)
        d1 = np.abs(k * ga - np.round(k * ga))
        d2 = np.abs((k - 1) * th - np.round((k - 1) * th))
        worst = np.maximum(d1, d2)
        i = int(np.argmin(worst))
        if worst[i] < max(best["residual_gamma"], best["residual_theta"]):
            kk = int(k[i])
            best = {"k": kk, "residual_gamma": residual(gamma, kk),
                    "residual_theta": residual(theta, kk - 1)}
        for idx in np.nonzero((d1 < delta + margin) & (d2 < delta + margin))[0]:
            kk = int(k[idx])
            r1, r2 = residual(gamma, kk), residual(theta, kk - 1)
            if r1 < eps and r2 < eps:
                return kk
    raise BudgetError(f"no k <= {budget} meets both predicates at eps={eps}", best)


@dataclass(frozen=True)
class EmbeddingStep:
    """One stage ``n`` of the embedding sequences with verified defects."""

    n: int
    k: int
    l: int
    k_defect: float  # |e^{2 pi i k theta} - 1|
    l_defect: float  # |e^{2 pi i k N l theta} - e^{2 pi i gamma}|

    @property
    def pair(self) -> tuple[int, int]:
        return self.k, self.l

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "l": self.l,
                "k_defect": self.k_defect, "l_defect": self.l_defect,
                "bound": 1.0 / self.n}


def emb_sequences(theta, gamma, N: int, count: int, budget: int = DEFAULT_BUDGET,
                  dps: int = DEFAULT_DPS) -> list[EmbeddingStep]:
    """Integers ``k_n, l_n`` for ``n = 1..count``.

    ``k_n`` is :func:`find_kn` at ``eps = 1/n``; ``l_n`` is the smallest
    ``l >= 1`` with ``|e^{2 pi i k_n N l theta} - e^{2 pi i gamma}| < 1/n``.
    """
    out = []
    for n in range(1, count + 1):
        eps = Fraction(1, n)
        k = find_kn(theta, eps, budget, dps)
        alpha = scaled(theta, k * N)
        with mpmath.workdps(dps):
            delta = chord_threshold(mpmath.mpf(1) / n)
        l = first_hit(alpha, gamma, delta, start=1, dps=dps, limit=budget)
        if l is None or l > budget:
            raise BudgetError(f"no l <= {budget} at n={n}", {"n": n, "k": k})
        kd = residual(theta, k)
        ld = residual(theta, k * N * l, gamma)
        if not (kd < 1 / n and ld < 1 / n):
            raise VerificationError(f"stage {n}: defects {kd}, {ld} not below 1/{n}")
        out.append(EmbeddingStep(n, k, l, kd, ld))
    return out


# -- generalized Sidon sequences -----------------------------------------------------

@dataclass
class SidonPair:
    """Sequences with ``e_n = U^{k_n} V^{l_n}`` pairwise nearly anticommuting.

    Invariants (checked on construction by :func:`sidon_sequences`), for
    ``1 <= j < n <= horizon``::

        |e^{2 pi i theta k_j l_n} + 1| < 2^{-n}
        |e^{2 pi i theta k_n l_j} - 1| < 2^{-n}
    """

    theta: Any
    k: list[int]
    l: list[int]
    horizon: int
    dps: int
    residuals: dict = field(default_factory=dict)

    def monomial(self, n: int) -> tuple[int, int]:
        """Exponents of ``e_n`` (1-based)."""
        return self.k[n - 1], self.l[n - 1]

    def to_dict(self) -> dict:
        return {"theta": describe(self.theta), "horizon": self.horizon,
                "dps": self.dps, "k": [str(v) for v in self.k],
                "l": [str(v) for v in self.l], "residuals": self.residuals}


def _sidon_residuals(theta, k, l, dps) -> dict:
    plus, minus = [], []
    with mpmath.workdps(dps):
        th = real_value(theta, dps)
        for n in range(2, len(k) + 1):
            for j in range(1, n):
                rp = chord(th * k[j - 1] * l[n - 1] - mpmath.mpf("0.5"))
                rm = chord(th * k[n - 1] * l[j - 1])
                plus.append([j, n, float(rp)])
                minus.append([j, n, float(rm)])
    return {"plus": plus, "minus": minus}


def sidon_sequences(theta, N: int, budget: int | None = None,
                    dps: int = DEFAULT_DPS) -> SidonPair:
    """Inductive construction of odd ``k_n`` and increasing ``l_n`` up to ``N``.

    Starting from ``k_1 = l_1 = 1``:

    * ``l_{n+1}`` is the smallest ``l > l_n`` with
      ``|e^{2 pi i theta l} + 1| < 1 / (2^{n+1} k_n)``; raising to the odd
      power ``k_j <= k_n`` keeps ``e^{2 pi i theta k_j l}`` within
      ``2^{-(n+1)}`` of ``-1``.
    * ``k_{n+1} = 2k + 1 > k_n`` with ``k`` smallest such that
      ``|e^{2 pi i theta (2k + 1)} - 1| < 1 / (2^{n+1} l_n)``.
    """
    if N < 1:
        raise ValueError("horizon must be >= 1")
    k, l = [1], [1]
    for n in range(1, N):
        work = _work_dps(k[-1], l[-1], 2 ** (n + 1), base=dps)
        with mpmath.workdps(work):
            dl = chord_threshold(mpmath.mpf(1) / (2 ** (n + 1) * k[-1]))
            dk = chord_threshold(mpmath.mpf(1) / (2 ** (n + 1) * l[-1]))
        l_new = first_hit(theta, Fraction(1, 2), dl, start=l[-1] + 1, dps=work, limit=budget)
        if l_new is None or (budget is not None and l_new > budget):
            raise BudgetError(f"l_{n + 1} exceeds budget {budget}", {"n": n + 1})
        kk = first_hit(scaled(theta, 2), scaled(theta, -1), dk, start=k[-1] // 2 + 1, dps=work,
                       limit=None if budget is None else (budget - 1) // 2)
        if kk is None or (budget is not None and 2 * kk + 1 > budget):
            raise BudgetError(f"k_{n + 1} exceeds budget {budget}", {"n": n + 1})
        l.append(l_new)
        k.append(2 * kk + 1)
    work = _work_dps(k[-1], l[-1], 2 ** N, base=dps) + 20
    res = _sidon_residuals(theta, k, l, work)
    for j, n, r in res["plus"] + res["minus"]:
        if not r < 2.0 ** (-n):
            raise VerificationError(f"pair ({j},{n}) residual {r} >= 2^-{n}")
    return SidonPair(theta, k, l, N, work, res)


def anticommutator_value(theta, p: tuple[int, int], q: tuple[int, int],
                         dps: int | None = None) -> float:
    """``||PQ + QP||`` for monomials ``P = U^p0 V^p1``, ``Q = U^q0 V^q1``.

    Equals ``2 |cos(pi theta (q1 p0 - p1 q0))|``.
    """
    e = q[1] * p[0] - p[1] * q[0]
    dps = dps or _work_dps(e)
    with mpmath.workdps(dps):
        return float(2 * abs(mpmath.cos(mpmath.pi * real_value(theta, dps) * e)))


# -- verification of near-anticommutation -------------------------------------------

def deep_ladder(theta, min_q2, rungs: int, dps: int = DEFAULT_DPS) -> list[Convergent]:
    """The first ``rungs`` convergents whose squared denominator exceeds ``min_q2``."""
    count = 16
    while True:
        convs = cf_convergents(theta, count, dps)
        deep = [c for c in convs if c.q * c.q > min_q2]
        if len(deep) >= rungs or len(convs) < count:
            return deep[:rungs]
        count *= 2


def _matrix_anticommutator(P: tuple[int, int], Q: tuple[int, int], c: Convergent) -> float:
    """Largest singular value of ``pi(P)pi(Q) + pi(Q)pi(P)`` in the ``q x q`` model.

    The sum is supported on one lattice point, so evaluating at ``z = (1, 1)``
    gives the exact operator norm at ``theta = p/q``.
    """
    from .matrix_model import basis_matrix
    a, b = c.p % c.q, c.q
    A = basis_matrix(P[0], P[1], a, b)
    B = basis_matrix(Q[0], Q[1], a, b)
    return float(np.linalg.norm(A @ B + B @ A, 2))


def _algebra_anticommutator(P: tuple[int, int], Q: tuple[int, int], theta_r: Fraction) -> float:
    """The same norm from exact core-algebra products at a rational parameter."""
    from .algebra import QPoly, mul
    x = QPoly.monomial(P[0], P[1], theta_r)
    y = QPoly.monomial(Q[0], Q[1], theta_r)
    s = mul(x, y) + mul(y, x)
    # single monomial: its norm is the modulus of its coefficient
    return max((abs(v) for v in s.coeffs.values()), default=0.0)


def anticommutator_check(pair: SidonPair, matrix_qmax: int = 512, rungs: int = 3,
                         adjoint: bool = False) -> dict:
    """Check ``||e_n e_j + e_j e_n|| <= 2^{1-n}`` for all ``j < n`` three ways.

    * the phase formula at ``theta`` in high precision;
    * exact core-algebra products at deep convergents (``q^2`` far beyond the
      exponent sizes), whose spread against the formula is the ladder delta;
    * matrix-model products at shallow convergents ``q <= matrix_qmax``,
      which must match the formula evaluated at the same rational.

    With ``adjoint=True`` the pair ``e_n, e_j^*`` is used instead.
    """
    theta = pair.theta
    shallow = [c for c in cf_convergents(theta, 64, pair.dps) if c.q <= matrix_qmax]
    rows = []
    violations = []
    for n in range(2, pair.horizon + 1):
        for j in range(1, n):
            P = pair.monomial(n)
            Q = pair.monomial(j)
            if adjoint:
                Q = (-Q[0], -Q[1])
            exact = anticommutator_value(theta, P, Q, pair.dps)
            bound = 2.0 ** (1 - n)
            e = abs(Q[1] * P[0] - P[1] * Q[0])
            deep = deep_ladder(theta, 10 ** 12 * max(e, 1), rungs, pair.dps)
            ladder = [{"p": str(c.p), "q": str(c.q),
                       "value": _algebra_anticommutator(P, Q, c.fraction)} for c in deep]
            delta = max(abs(r["value"] - exact) for r in ladder)
            matrix_err = 0.0
            for c in shallow:
                mv = _matrix_anticommutator(P, Q, c)
                fv = anticommutator_value(c.fraction, P, Q, pair.dps)
                matrix_err = max(matrix_err, abs(mv - fv))
            ok = exact < bound and ladder[-1]["value"] <= bound + delta and matrix_err < 1e-9
            row = {"j": j, "n": n, "formula": exact, "bound": bound, "ladder": ladder,
                   "ladder_delta": delta, "matrix_rungs": len(shallow),
                   "matrix_max_err": matrix_err, "ok": ok}
            rows.append(row)
            if not ok:
                violations.append((j, n))
    return {"rows": rows, "violations": violations, "adjoint": adjoint}


def span_norm_check(pair: SidonPair, n: int, Nspan: int, trials: int = 100, seed: int = 0,
                    moments: int = 4) -> dict:
    """Norm of ``x = sum_i a_i e_{n+i}`` against its ``L_2`` norm for random ``a``.

    For each trial this records:

    * ``l2``: ``tau(x^* x)`` from exact algebra, which must equal ``sum |a_i|^2``;
    * ``upper``: ``2 sum |a_i|^2 + sum_{i != j} |a_i||a_j| c_ij`` with the exact
      anticommutator norms ``c_ij``, a bound on ``||x||^2``, which must not exceed
      ``2 sum |a_i|^2 + Nspan (Nspan - 1) 2^{1-n} max |a_i|^2``;
    * ``moment``: ``tau((x^* x)^r)^{1/2r}`` for ``r <= moments <= 4`` at a deep
      convergent, lower bounds for ``||x||`` that must stay below ``2 ||x||_2``.
    """
    from .algebra import QPoly, adjoint as adj, mul, trace_product
    if not 1 <= moments <= 4:
        raise ValueError("moments must be between 1 and 4")
    if n + Nspan > pair.horizon:
        raise ValueError(f"pair horizon {pair.horizon} < n + Nspan = {n + Nspan}")
    idx = [n + i for i in range(1, Nspan + 1)]
    mons = [pair.monomial(i) for i in idx]
    c = np.zeros((Nspan, Nspan))
    for a in range(Nspan):
        for b in range(Nspan):
            if a != b:
                Q = (-mons[b][0], -mons[b][1])
                c[a, b] = anticommutator_value(pair.theta, mons[a], Q, pair.dps)
    R = 2 * moments
    kmax = max(abs(m[0]) for m in mons)
    lmax = max(abs(m[1]) for m in mons)
    theta_r = deep_ladder(pair.theta, 10 ** 12 * (R * kmax) * (R * lmax), 1, pair.dps)[0].fraction
    rng = np.random.default_rng(seed)
    rows, violations = [], []
    for t in range(trials):
        a = rng.normal(size=Nspan) + 1j * rng.normal(size=Nspan)
        if t == 0:
            a = np.eye(Nspan)[0].astype(complex)
        mass = float(np.sum(np.abs(a) ** 2))
        x = QPoly(theta_r, {m: v for m, v in zip(mons, a)})
        l2 = trace_product(adj(x), x).real
        upper = 2 * mass + float(np.abs(a) @ c @ np.abs(a))
        formula = 2 * mass + Nspan * (Nspan - 1) * 2.0 ** (1 - n) * float(np.max(np.abs(a))) ** 2
        y = mul(adj(x), x)
        y2 = mul(y, y)
        # tau(y^r) for r = 1..4 without forming powers beyond y^2
        taus = [y.trace(), trace_product(y, y), trace_product(y2, y), trace_product(y2, y2)]
        lower = [abs(v) ** (1 / (2 * r)) for r, v in enumerate(taus[:moments], start=1)]
        row = {"trial": t, "l2_sq": l2, "mass": mass, "upper_sq": upper, "formula_sq": formula,
               "moment_lower": lower, "two_l2": 2 * math.sqrt(mass)}
        ok = (abs(l2 - mass) <= 1e-12 * max(1.0, mass) and upper <= formula * (1 + 1e-12)
              and max(lower) <= 2 * math.sqrt(mass))
        row["ok"] = ok
        rows.append(row)
        if not ok:
            violations.append(t)
    return {"n": n, "Nspan": Nspan, "trials": trials, "seed": seed,
            "theta_rung": [str(theta_r.numerator), str(theta_r.denominator)],
            "rows": rows, "violations": violations}

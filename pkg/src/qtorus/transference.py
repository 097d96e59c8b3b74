"""Transference between the circle and cyclic groups.

Covers the discretization maps ``z^k <-> gamma_n^k`` with their sinc bounds,
the conditional expectation onto ``L(Z/nZ)``, the Fejér-kernel construction
of measures with convex coefficient profiles, and periodization of symbols.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np

from .algebra import ParameterError, TrigPoly
from .multipliers import Symbol


def cyclic_rep(k: int, n: int) -> int:
    """Representative of ``k mod n`` with smallest absolute value; ties go to ``+n/2``."""
    r = k % n
    return r - n if r > n // 2 else r


@dataclass(frozen=True, eq=False)
class CyclicPoly:
    """``sum c[k] gamma_n^k`` in the group algebra of ``Z/nZ``.

    Keys are reduced to :func:`cyclic_rep` on construction and aliased
    coefficients are summed.
    """

    n: int
    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("group order must be positive")
        out: dict[int, complex] = {}
        for k, c in self.coeffs.items():
            r = cyclic_rep(int(k), self.n)
            out[r] = out.get(r, 0j) + complex(c)
        object.__setattr__(self, "coeffs", {k: c for k, c in out.items() if c != 0})

    def __getitem__(self, k: int) -> complex:
        return self.coeffs.get(cyclic_rep(k, self.n), 0j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CyclicPoly):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return self.n == other.n and all(self[k] == other[k] for k in keys)

    def values(self) -> np.ndarray:
        """``y(j) = sum_k c[k] omega^{jk}`` for ``j = 0..n-1``."""
        buf = np.zeros(self.n, complex)
        for k, c in self.coeffs.items():
            buf[k % self.n] += c
        return np.fft.ifft(buf) * self.n


def _power_mean(vals: np.ndarray, p: float, axis=-1) -> np.ndarray:
    a = np.abs(vals)
    if math.isinf(p):
        return a.max(axis=axis)
    return np.mean(a ** p, axis=axis) ** (1.0 / p)


def cyclic_lp_norm(x: CyclicPoly, p: float) -> float:
    return float(_power_mean(x.values(), p))


def trig_lp_norm(x: TrigPoly, p: float, grid: int | None = None) -> float:
    """``L_p`` norm on the circle by quadrature; exact for even ``p`` on a fine enough grid.

    For ``p = inf`` the grid maximum is returned, a lower bound.
    """
    grid = grid or 64 * (2 * x.degree + 1)
    return float(_power_mean(x.values(grid), p))


# -- discretization -----------------------------------------------------------------

def _check_dn(d: int, n: int):
    if n <= 2 * d:
        raise ParameterError(f"need n > 2d, got d={d}, n={n}")


def j_dn(x: TrigPoly, n: int, d: int | None = None) -> CyclicPoly:
    d = x.degree if d is None else d
    _check_dn(d, n)
    if x.degree > d:
        raise ParameterError(f"degree {x.degree} exceeds d={d}")
    return CyclicPoly(n, dict(x.coeffs))


def j_dn_inverse(y: CyclicPoly, d: int) -> TrigPoly:
    _check_dn(d, y.n)
    bad = [k for k in y.coeffs if abs(k) > d]
    if bad:
        raise ParameterError(f"support {sorted(bad)} outside [-{d}, {d}]")
    return TrigPoly(dict(y.coeffs))


def sinc_bound(d: int, n: int) -> float:
    """``sinc(d pi / n)^{-2}``."""
    _check_dn(d, n)
    return float(np.sinc(d / n)) ** -2


def sinc_bound_inverse(d: int, n: int) -> float:
    """``((1 - 2d/n) sinc(d pi / n))^{-2}``."""
    _check_dn(d, n)
    return float((1 - 2 * d / n) * np.sinc(d / n)) ** -2


def cond_expectation(x: TrigPoly, n: int) -> CyclicPoly:
    """``z^k -> sinc(k pi / n) gamma_n^k``, summing aliased classes."""
    return CyclicPoly(n, _alias_sum({k: c * np.sinc(k / n) for k, c in x.coeffs.items()}, n))


def _alias_sum(coeffs: Mapping[int, complex], n: int) -> dict[int, complex]:
    out: dict[int, complex] = {}
    for k, c in coeffs.items():
        r = cyclic_rep(k, n)
        out[r] = out.get(r, 0j) + c
    return out


def embed_tail(k: int, n: int, J: int) -> float:
    """``sum_{|j| > J} sinc^2((k + j n)/n)``, the squared mass dropped by truncation."""
    t = mpmath.mpf(k) / n
    s2 = mpmath.sin(mpmath.pi * t) ** 2
    if s2 == 0:
        return 0.0
    # sum_{j > J} 1/(j+t)^2 + 1/(j-t)^2 = psi'(J+1+t) + psi'(J+1-t)
    tail = mpmath.psi(1, J + 1 + t) + mpmath.psi(1, J + 1 - t)
    return float(s2 / mpmath.pi ** 2 * tail)


def cyclic_embed(y: CyclicPoly, J: int) -> tuple[TrigPoly, float]:
    """``gamma_n^k -> sum_{|j| <= J} sinc((k + jn)/n) z^{k + jn}``.

    Returns the truncated polynomial and the squared ``L_2`` mass dropped.
    """
    n = y.n
    js = np.arange(-J, J + 1)
    out: dict[int, complex] = {}
    tail = 0.0
    for k, c in y.coeffs.items():
        idx = k + js * n
        w = np.sinc(idx / n)
        for e, v in zip(idx.tolist(), w):
            if v != 0:
                out[e] = c * v
        tail += abs(c) ** 2 * embed_tail(k, n, J)
    return TrigPoly(out), tail


# -- empirical norms ------------------------------------------------------------------

def _random_coeffs(d: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    c = rng.normal(size=(samples, 2 * d + 1)) + 1j * rng.normal(size=(samples, 2 * d + 1))
    return c / np.linalg.norm(c, axis=1, keepdims=True)


def _structured_coeffs(d: int) -> np.ndarray:
    """Dirichlet, Fejér and single-frequency vectors, which tend to be extremal."""
    ks = np.arange(-d, d + 1)
    rows = [np.ones(2 * d + 1), 1 - np.abs(ks) / (d + 1)]
    rows += [np.eye(2 * d + 1)[i] for i in range(2 * d + 1)]
    rows.append(np.where(ks >= 0, 1.0, 0.0))
    return np.array(rows, complex)


def _values(coeffs: np.ndarray, d: int, grid: int) -> np.ndarray:
    buf = np.zeros((coeffs.shape[0], grid), complex)
    buf[:, np.arange(-d, d + 1) % grid] = coeffs
    return np.fft.ifft(buf, axis=1) * grid


def empirical_jdn_norms(d: int, n: int, p: float, samples: int = 10_000,
                        seed: int = 0, oversample: int = 64) -> dict:
    """Largest observed ratios for ``j_dn`` and its inverse on a random ensemble.

    Circle norms use a grid of ``oversample * n`` points containing the
    ``n``-th roots of unity, so ``p = inf`` compares like with like.
    """
    _check_dn(d, n)
    rng = np.random.default_rng([seed, d, n])
    C = np.concatenate([_structured_coeffs(d), _random_coeffs(d, samples, rng)])
    circle = _power_mean(_values(C, d, oversample * n), p)
    cyclic = _power_mean(_values(C, d, n), p)
    fwd = cyclic / circle
    inv = circle / cyclic
    return {
        "d": d, "n": n, "p": p, "samples": int(len(C)),
        "forward_max": float(fwd.max()), "forward_bound": sinc_bound(d, n),
        "inverse_max": float(inv.max()), "inverse_bound": sinc_bound_inverse(d, n),
    }


# -- measures -------------------------------------------------------------------------

def fejer_hat(order: int, j) -> np.ndarray:
    """Fourier coefficients ``(1 - |j|/(order+1))^+`` of the Fejér kernel."""
    return np.clip(1.0 - np.abs(np.asarray(j, float)) / (order + 1), 0.0, None)


@dataclass(frozen=True)
class FejerComponent:
    weight: float
    order: int
    shift: int = 0

    def to_dict(self) -> dict:
        return {"weight": self.weight, "order": self.order, "shift": self.shift}


@dataclass(frozen=True)
class AtomicFejerMeasure:
    """``sum w_i z^{s_i} K_{k_i} + a delta_1``, optionally convolved as a shifted pair.

    With ``pair = (s, t)`` the measure is ``(z^s nu) * (z^t nu)`` where ``nu``
    is the structure described by ``components`` and ``atom``.
    """

    components: tuple[FejerComponent, ...]
    atom: float = 0.0
    pair: tuple[int, int] | None = None

    def base_fourier(self, j) -> np.ndarray:
        j = np.asarray(j)
        out = np.full(j.shape, complex(self.atom))
        for c in self.components:
            out = out + c.weight * fejer_hat(c.order, j - c.shift)
        return out

    def fourier(self, k) -> np.ndarray:
        k = np.asarray(k)
        if self.pair is None:
            return self.base_fourier(k)
        s, t = self.pair
        return self.base_fourier(k - s) * self.base_fourier(k - t)

    def density(self, t: np.ndarray) -> np.ndarray:
        """Density of the absolutely continuous part of the base structure."""
        out = np.zeros_like(np.asarray(t, float), dtype=complex)
        for c in self.components:
            js = np.arange(-c.order, c.order + 1)
            w = fejer_hat(c.order, js)
            out = out + c.weight * (w[:, None] * np.exp(1j * np.outer(js + c.shift, t))).sum(0)
        return out

    def base_mass_bound(self) -> float:
        return sum(abs(c.weight) for c in self.components) + abs(self.atom)

    def to_dict(self) -> dict:
        return {"components": [c.to_dict() for c in self.components], "atom": self.atom,
                "pair": None if self.pair is None else list(self.pair)}


def measure_fourier(mu: AtomicFejerMeasure, k):
    out = mu.fourier(k)
    return complex(out) if np.ndim(out) == 0 else out


def total_variation_bound(mu: AtomicFejerMeasure) -> float:
    """Exact for positive unmodulated structures; convolution pairs multiply masses."""
    m = mu.base_mass_bound()
    return m * m if mu.pair is not None else m


def convex_measure(f: Callable[[float], float] | Sequence[float], n: int,
                   tol: float = 1e-12) -> AtomicFejerMeasure:
    """Measure ``mu`` with ``mu^(k) = f(|k|)`` for ``|k| <= n`` and mass at most ``f(n)^2``.

    ``f`` must satisfy ``f(0) = 1`` and be nondecreasing and convex on
    ``0..n``; it may be a callable or the sequence ``f(0), ..., f(n)``.
    """
    if n < 0:
        raise ParameterError("n must be nonnegative")
    vals = [float(f(i)) for i in range(n + 1)] if callable(f) else [float(v) for v in f]
    if len(vals) != n + 1:
        raise ParameterError(f"expected {n + 1} values, got {len(vals)}")
    if abs(vals[0] - 1.0) > tol:
        raise ParameterError(f"f(0) must be 1, got {vals[0]}")
    for i in range(n):
        if vals[i + 1] < vals[i] - tol:
            raise ParameterError(f"f decreases at index {i + 1}")
    for i in range(1, n):
        if vals[i + 1] - 2 * vals[i] + vals[i - 1] < -tol:
            raise ParameterError(f"f is not convex at index {i}")
    # m_k = f(n - k) for k <= n, then constant 1
    m = [vals[n - k] for k in range(n + 1)] + [1.0, 1.0]
    comps = []
    for k in range(n):
        d2 = m[k] - 2 * m[k + 1] + m[k + 2]
        w = (k + 1) * max(d2, 0.0)
        if w > 0:
            comps.append(FejerComponent(w, k))
    return AtomicFejerMeasure(tuple(comps), 1.0, (n, -n))


# -- periodization --------------------------------------------------------------------

def periodization_constant(n: int) -> float:
    """``c = sinc_bound(n, n^2) * sinc_bound_inverse(n, n^2)``."""
    return sinc_bound(n, n * n) * sinc_bound_inverse(n, n * n)


def periodize(phi: Symbol, n: int) -> Symbol:
    """``phi_n(k) = phi(r) (1 - |r|/n)^+ / c`` with ``r`` the reduced residue of ``k mod n^2``."""
    if phi.d != 1:
        raise ParameterError("periodize expects a 1-D symbol")
    c = periodization_constant(n)
    N = n * n
    f = phi.func

    def g(pts):
        r = np.mod(pts[:, 0], N)
        r = np.where(r > N // 2, r - N, r)
        w = np.clip(1.0 - np.abs(r) / n, 0.0, None)
        return f(r[:, None]) * w / c

    return Symbol(1, g, period=(N,), name=f"periodize({phi.name},{n})")

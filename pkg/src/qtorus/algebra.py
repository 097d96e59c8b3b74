"""Twisted polynomial algebra of the 2-dimensional quantum torus.

Elements are finite sums ``sum c[m, n] U^m V^n`` with the generators ordered
U-first and subject to ``UV = e^{2 pi i theta} VU``.  Moving ``V^b`` past
``U^c`` costs the phase ``e^{-2 pi i theta b c}``, which gives

    (U^a V^b)(U^c V^e) = e^{-2 pi i theta b c} U^{a+c} V^{b+e}
    (U^m V^n)^*        = e^{-2 pi i theta m n} U^{-m} V^{-n}

Phases are carried as angles in turns.  For rational ``theta`` (stored as
:class:`fractions.Fraction`) the turn is reduced exactly with integer
arithmetic before the single complex exponential is taken, so arbitrarily
large exponents cost no accuracy.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import numpy as np

Theta = Union[Fraction, float]


class ParameterError(ValueError):
    """Raised when operands carry incompatible or invalid parameters."""


def normalize_theta(theta) -> Theta:
    """Reduce ``theta`` mod 1, keeping rationals exact."""
    if isinstance(theta, Fraction):
        return theta % 1
    if isinstance(theta, int):
        return Fraction(0)
    if isinstance(theta, str):
        return Fraction(theta) % 1
    return float(theta) % 1.0


def theta_equal(a: Theta, b: Theta) -> bool:
    a, b = normalize_theta(a), normalize_theta(b)
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    d = abs(float(a) - float(b))
    return min(d, 1.0 - d) < 1e-15


@lru_cache(maxsize=64)
def _roots_table(den: int) -> np.ndarray:
    k = np.arange(den)
    table = np.exp(2j * np.pi * k / den)
    # quarter turns are exact units, so products like VU at theta = 1/2 stay exact
    quarter = (4 * k) % den == 0
    table[quarter] = np.array([1, 1j, -1, -1j])[(4 * k[quarter]) // den]
    return table


def turn_phase(turns: Theta) -> complex:
    """Return ``e^{2 pi i turns}``."""
    if isinstance(turns, Fraction):
        t = turns % 1
        if t.denominator <= 4096:
            return complex(_roots_table(t.denominator)[t.numerator])
        return cmath.exp(2j * math.pi * float(t))
    return cmath.exp(2j * math.pi * (turns % 1.0))


def _scaled_turn(theta: Theta, k: int) -> Theta:
    """``theta * k`` reduced mod 1, exact for rational theta."""
    if isinstance(theta, Fraction):
        num, den = theta.numerator, theta.denominator
        return Fraction((num * k) % den, den)
    return math.fmod(theta * k, 1.0)


@dataclass(frozen=True)
class Monomial:
    """A unit-modulus multiple ``e^{2 pi i turns} U^m V^n``."""

    m: int
    n: int
    theta: Theta
    turns: Theta = Fraction(0)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not theta_equal(self.theta, other.theta):
            raise ParameterError("theta mismatch")
        shift = _scaled_turn(self.theta, -self.n * other.m)
        return Monomial(self.m + other.m, self.n + other.n, self.theta,
                        (self.turns + other.turns + shift) % 1)

    def adjoint(self) -> "Monomial":
        shift = _scaled_turn(self.theta, -self.m * self.n)
        return Monomial(-self.m, -self.n, self.theta, (shift - self.turns) % 1)

    @property
    def phase(self) -> complex:
        return turn_phase(self.turns)

    def to_qpoly(self) -> "QPoly":
        return QPoly(self.theta, {(self.m, self.n): self.phase})


@dataclass(frozen=True, eq=False)
class QPoly:
    """Finitely supported element of the quantum torus at parameter ``theta``.

    ``coeffs`` maps lattice points ``(m, n)`` to the coefficient of
    ``U^m V^n``.  Instances are immutable; arithmetic returns new objects.
    """

    theta: Theta
    coeffs: Mapping[tuple[int, int], complex] = field(default_factory=dict)
    prune: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_theta(self.theta))
        clean = {}
        for (m, n), c in self.coeffs.items():
            c = complex(c)
            if self.prune and abs(c) < self.prune:
                continue
            clean[(int(m), int(n))] = c
        object.__setattr__(self, "coeffs", clean)

    # -- constructors -------------------------------------------------
    @classmethod
    def one(cls, theta) -> "QPoly":
        return cls(theta, {(0, 0): 1.0})

    @classmethod
    def monomial(cls, m: int, n: int, theta, coeff: complex = 1.0) -> "QPoly":
        return cls(theta, {(m, n): coeff})

    @classmethod
    def U(cls, theta) -> "QPoly":
        return cls.monomial(1, 0, theta)

    @classmethod
    def V(cls, theta) -> "QPoly":
        return cls.monomial(0, 1, theta)

    @classmethod
    def random(cls, theta, degree: int, rng: np.random.Generator,
               density: float = 1.0) -> "QPoly":
        """Gaussian complex coefficients on the box ``|m|, |n| <= degree``."""
        coeffs = {}
        for m in range(-degree, degree + 1):
            for n in range(-degree, degree + 1):
                if density < 1.0 and rng.random() > density:
                    continue
                coeffs[(m, n)] = complex(rng.normal(), rng.normal())
        if not coeffs:
            coeffs[(0, 0)] = 1.0
        return cls(theta, coeffs)

    # -- basic queries ------------------------------------------------
    @property
    def support(self) -> list[tuple[int, int]]:
        return sorted(self.coeffs)

    @property
    def degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(max(abs(m), abs(n)) for m, n in self.coeffs)

    def __getitem__(self, mn: tuple[int, int]) -> complex:
        return self.coeffs.get(tuple(mn), 0j)

    def with_theta(self, theta) -> "QPoly":
        """Same coefficient data read in a different algebra."""
        return QPoly(theta, self.coeffs, self.prune)

    def _check(self, other: "QPoly"):
        if not theta_equal(self.theta, other.theta):
            raise ParameterError(
                f"theta mismatch: {self.theta!r} vs {other.theta!r}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, QPoly):
            return NotImplemented
        if not theta_equal(self.theta, other.theta):
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self[k] == other[k] for k in keys)

    __hash__ = None

    def allclose(self, other: "QPoly", atol: float = 1e-12) -> bool:
        if not theta_equal(self.theta, other.theta):
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def max_abs_diff(self, other: "QPoly") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)

    # -- vector space ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QPoly):
            other = QPoly(self.theta, {(0, 0): other})
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0j) + c
        return QPoly(self.theta, out, self.prune)

    __radd__ = __add__

    def __neg__(self):
        return QPoly(self.theta, {k: -c for k, c in self.coeffs.items()}, self.prune)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QPoly) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: complex) -> "QPoly":
        return QPoly(self.theta, {k: s * c for k, c in self.coeffs.items()}, self.prune)

    def __mul__(self, other):
        if isinstance(other, QPoly):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int) -> "QPoly":
        if k < 0:
            raise ParameterError("negative powers are only defined for monomials")
        out = QPoly.one(self.theta)
        for _ in range(k):
            out = mul(out, self)
        return out

    def adjoint(self) -> "QPoly":
        return adjoint(self)

    def trace(self) -> complex:
        return trace(self)

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        if isinstance(self.theta, Fraction):
            th = {"num": self.theta.numerator, "den": self.theta.denominator}
        else:
            th = {"real": float(self.theta)}
        rows = [[m, n, c.real, c.imag] for (m, n), c in sorted(self.coeffs.items())]
        return {"theta": th, "coeffs": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: Mapping) -> "QPoly":
        th = d["theta"]
        if "num" in th:
            theta = Fraction(int(th["num"]), int(th["den"]))
        else:
            theta = float(th["real"])
        coeffs = {}
        for m, n, re, im in d["coeffs"]:
            coeffs[(int(m), int(n))] = coeffs.get((int(m), int(n)), 0j) + complex(re, im)
        return cls(theta, coeffs)

    @classmethod
    def from_json(cls, s: str) -> "QPoly":
        return cls.from_dict(json.loads(s))


def _pair_phase(theta: Theta, k: int) -> complex:
    return turn_phase(_scaled_turn(theta, k))


def mul(x: QPoly, y: QPoly, prune: float | None = None) -> QPoly:
    """Product in the quantum torus, bilinear over the monomial rule."""
    x._check(y)
    theta = x.theta
    out: dict[tuple[int, int], complex] = {}
    for (a, b), cx in x.coeffs.items():
        for (c, e), cy in y.coeffs.items():
            key = (a + c, b + e)
            term = cx * cy
            if b and c:
                term *= _pair_phase(theta, -b * c)
            out[key] = out.get(key, 0j) + term
    return QPoly(theta, out, x.prune if prune is None else prune)


def adjoint(x: QPoly) -> QPoly:
    out = {}
    for (m, n), c in x.coeffs.items():
        ph = _pair_phase(x.theta, -m * n) if (m and n) else 1.0
        out[(-m, -n)] = c.conjugate() * ph
    return QPoly(x.theta, out, x.prune)


def trace(x: QPoly) -> complex:
    return x[(0, 0)]


def fourier_coeff(x: QPoly, m: tuple[int, int]) -> complex:
    """Coefficient of ``U^m[0] V^m[1]`` computed as ``trace(x (U^m V^n)^*)``."""
    mono = QPoly.monomial(m[0], m[1], x.theta)
    return trace(mul(x, adjoint(mono)))


def commutator_phase(theta: Theta, p: tuple[int, int], q: tuple[int, int]) -> complex:
    """``lambda`` with ``(U^{p0}V^{p1})(U^{q0}V^{q1}) = lambda (U^{q0}V^{q1})(U^{p0}V^{p1})``."""
    return _pair_phase(theta, q[1] * p[0] - p[1] * q[0])


@dataclass(frozen=True, eq=False)
class TorusPoly4:
    """Coefficient map on Z^4 for the tensor product of two quantum tori.

    Lattice points are ``(m1, n1, m2, n2)`` for ``U^{m1}V^{n1} (x) U^{m2}V^{n2}``.
    """

    thetas: tuple[Theta, Theta]
    coeffs: Mapping[tuple[int, int, int, int], complex]

    def trace(self) -> complex:
        return complex(self.coeffs.get((0, 0, 0, 0), 0j))

    def l2_norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))


def tensor_shift(x: QPoly, theta1, theta2) -> TorusPoly4:
    """Image of ``x`` under ``U -> U (x) U``, ``V -> V (x) V``.

    ``x`` must live at ``theta1 + theta2``.  Since ``U^m V^n`` maps to
    ``U^m V^n (x) U^m V^n`` with no extra phase, coefficients land on the
    diagonal sublattice.
    """
    t1, t2 = normalize_theta(theta1), normalize_theta(theta2)
    if not theta_equal(x.theta, normalize_theta(t1 + t2)):
        raise ParameterError("x must live at theta1 + theta2")
    return TorusPoly4((t1, t2), {(m, n, m, n): c for (m, n), c in x.coeffs.items()})


def from_terms(theta, terms: Iterable[tuple[int, int, complex]]) -> QPoly:
    coeffs: dict[tuple[int, int], complex] = {}
    for m, n, c in terms:
        coeffs[(m, n)] = coeffs.get((m, n), 0j) + c
    return QPoly(theta, coeffs)


def trace_product(x: QPoly, y: QPoly) -> complex:
    """``trace(mul(x, y))`` without forming the product.

    Only pairs ``(m, n)``, ``(-m, -n)`` contribute, each with phase
    ``e^{-2 pi i theta n (-m)} = e^{2 pi i theta m n}``.
    """
    x._check(y)
    total = 0j
    for (m, n), c in x.coeffs.items():
        d = y.coeffs.get((-m, -n))
        if d is not None:
            total += c * d * turn_phase(_scaled_turn(x.theta, m * n))
    return total


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """A trigonometric polynomial ``sum c[k] z^k`` on the circle."""

    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           {int(k): complex(c) for k, c in self.coeffs.items() if c != 0})

    @classmethod
    def monomial(cls, k: int, coeff: complex = 1.0) -> "TrigPoly":
        return cls({k: coeff})

    @classmethod
    def random(cls, degree: int, rng: np.random.Generator) -> "TrigPoly":
        ks = range(-degree, degree + 1)
        c = rng.normal(size=len(ks)) + 1j * rng.normal(size=len(ks))
        return cls(dict(zip(ks, c)))

    @property
    def degree(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def __getitem__(self, k: int) -> complex:
        return self.coeffs.get(k, 0j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrigPoly):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self[k] == other[k] for k in keys)

    def allclose(self, other: "TrigPoly", atol: float = 1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0j) + c
        return TrigPoly(out)

    def scale(self, s: complex) -> "TrigPoly":
        return TrigPoly({k: s * c for k, c in self.coeffs.items()})

    def values(self, n: int) -> np.ndarray:
        """Values at the ``n``-th roots of unity ``e^{2 pi i j / n}``."""
        buf = np.zeros(n, complex)
        for k, c in self.coeffs.items():
            buf[k % n] += c
        return np.fft.ifft(buf) * n

    def l2_norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def as_qpoly(self, theta=Fraction(0)) -> QPoly:
        """Embed into the commutative subalgebra generated by ``U``."""
        return QPoly(theta, {(k, 0): c for k, c in self.coeffs.items()})

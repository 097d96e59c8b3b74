"""Matrix-valued model of the rational rotation algebra and its L_p norms.

At ``theta = a/b`` the assignment ``U -> z1 D``, ``V -> z2 S`` with
``D = diag(e^{2 pi i a k / b})`` and the cyclic shift ``S = sum e_{k,k-1}``
is a trace-preserving *-homomorphism into b x b matrix functions on the
2-torus, provided the target carries the normalized trace
``(1/b) Tr (x) Haar``.  Every L_p norm of the algebra is therefore an
integral of Schatten-p quantities of ``rep(x)(z)``, evaluated here by
tensor-grid quadrature on roots of unity.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np

from .algebra import ParameterError, QPoly, normalize_theta, theta_equal


@dataclass
class NormEstimate:
    """A norm value together with how it was obtained.

    ``kind`` is one of ``"lower"``, ``"upper"``, ``"exact"``, ``"approximate"``.
    """

    value: float
    kind: str
    grid: int | None = None
    delta: float | None = None
    ladder: list[dict] | None = None
    witness: Any = None
    transcript: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"value": self.value, "kind": self.kind, "grid": self.grid,
               "delta": self.delta, "ladder": self.ladder}
        if self.witness is not None:
            w = self.witness
            out["witness"] = w.to_dict() if hasattr(w, "to_dict") else w
        if self.transcript:
            out["transcript"] = self.transcript
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor grid of ``n``-th roots of unity in each torus coordinate."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("grid size must be positive")

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.n) / self.n)

    @classmethod
    def for_degree(cls, degree: int, factor: int = 4) -> "QuadratureGrid":
        return cls(factor * max(degree, 1) + 1)

    def refined(self) -> "QuadratureGrid":
        return QuadratureGrid(2 * self.n)


def rational_parts(theta) -> tuple[int, int]:
    theta = normalize_theta(theta)
    if not isinstance(theta, Fraction):
        raise ParameterError(
            "matrix model needs rational theta; use irrational_norm for real theta")
    return theta.numerator, theta.denominator


def clock_shift(a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    """The generator matrices ``D`` and ``S`` at ``theta = a/b``."""
    k = np.arange(1, b + 1)
    D = np.diag(np.exp(2j * np.pi * ((a * k) % b) / b))
    S = np.roll(np.eye(b), 1, axis=0)  # S e_{k-1} = e_k
    return D, S


def basis_matrix(m: int, n: int, a: int, b: int) -> np.ndarray:
    """``D^m S^n`` with exponents reduced exactly (any integer size)."""
    k = np.arange(1, b + 1)
    diag = np.exp(2j * np.pi * ((a % b) * (int(m) % b) * k % b) / b)
    S_n = np.roll(np.eye(b), n % b, axis=0)
    return diag[:, None] * S_n


@dataclass(frozen=True, eq=False)
class MatrixRep:
    """``rep(x)(z) = sum_{(m,n)} z1^m z2^n C[m, n]`` with ``b x b`` blocks."""

    a: int
    b: int
    coeff_matrices: Mapping[tuple[int, int], np.ndarray]

    @property
    def lattice(self) -> np.ndarray:
        keys = sorted(self.coeff_matrices)
        big = any(abs(v) >= 2 ** 62 for k in keys for v in k)
        return np.array(keys, dtype=object if big else np.int64).reshape(-1, 2)

    def stack(self) -> np.ndarray:
        keys = sorted(self.coeff_matrices)
        if not keys:
            return np.zeros((0, self.b, self.b), complex)
        return np.stack([self.coeff_matrices[k] for k in keys])

    def evaluate(self, z1, z2) -> np.ndarray:
        """Values at arbitrary points; result has shape ``z.shape + (b, b)``."""
        z1, z2 = np.asarray(z1, complex), np.asarray(z2, complex)
        return evaluate_at(self.stack(), self.lattice, z1, z2)

    def on_grid(self, grid: QuadratureGrid | int) -> np.ndarray:
        n = grid.n if isinstance(grid, QuadratureGrid) else int(grid)
        return grid_values(self.stack(), self.lattice, n)

    def trace(self) -> complex:
        c = self.coeff_matrices.get((0, 0))
        return 0j if c is None else complex(np.trace(c) / self.b)


def represent(x: QPoly, a: int | None = None, b: int | None = None) -> MatrixRep:
    """Matrix model of ``x`` at ``theta = a/b`` (defaults to ``x.theta``)."""
    if a is None or b is None:
        a, b = rational_parts(x.theta)
    g = math.gcd(a, b)
    a, b = (a // g) % b, b // g
    if not theta_equal(x.theta, Fraction(a, b)):
        raise ParameterError(f"x lives at {x.theta}, not at {a}/{b}")
    mats = {(m, n): c * basis_matrix(m, n, a, b) for (m, n), c in x.coeffs.items()}
    return MatrixRep(a, b, mats)


def read_back(coeff_matrices: Mapping[tuple[int, int], np.ndarray], a: int, b: int,
              theta=None) -> QPoly:
    """Recover algebra coefficients from matrix coefficients.

    Uses ``x(m,n) = (1/b) Tr(C[m,n] (D^m S^n)^*)``.
    """
    coeffs = {}
    for (m, n), C in coeff_matrices.items():
        P = basis_matrix(m, n, a, b)
        coeffs[(m, n)] = complex(np.trace(C @ P.conj().T) / b)
    return QPoly(Fraction(a, b) if theta is None else theta, coeffs)


# -- numerical kernels --------------------------------------------------------

def grid_values(stack: np.ndarray, lattice: np.ndarray, n: int) -> np.ndarray:
    """Evaluate ``sum_k z^{lattice[k]} stack[k]`` on the ``n x n`` root grid.

    ``stack`` has shape ``(..., K, s, s)``; the result ``(..., n, n, s, s)``.
    Lattice points must be distinct mod ``n``.
    """
    stack = np.asarray(stack, complex)
    *batch, K, s, _ = stack.shape
    C = np.zeros((*batch, n, n, s, s), complex)
    i1 = np.mod(lattice[:, 0], n).astype(np.int64) if K else np.zeros(0, int)
    i2 = np.mod(lattice[:, 1], n).astype(np.int64) if K else np.zeros(0, int)
    if K:
        flat = i1 * n + i2
        if len(np.unique(flat)) != K:
            raise ParameterError("grid too coarse: lattice points alias")
        C[..., i1, i2, :, :] = stack
    axes = (len(batch), len(batch) + 1)
    return np.fft.ifft2(C, axes=axes) * (n * n)


def grid_coefficients(values: np.ndarray, lattice: np.ndarray) -> np.ndarray:
    """Inverse of :func:`grid_values`: average of ``conj(z^m) values(z)``."""
    *batch, n, _, s, _ = values.shape
    axes = (len(batch), len(batch) + 1)
    F = np.fft.fft2(values, axes=axes) / (n * n)
    i1 = np.mod(lattice[:, 0], n).astype(np.int64)
    i2 = np.mod(lattice[:, 1], n).astype(np.int64)
    return F[..., i1, i2, :, :]


def evaluate_at(stack: np.ndarray, lattice: np.ndarray, z1: np.ndarray,
                z2: np.ndarray) -> np.ndarray:
    if len(lattice) == 0:
        s = stack.shape[-1]
        return np.zeros(z1.shape + (s, s), complex)
    w = (z1[..., None] ** lattice[:, 0]) * (z2[..., None] ** lattice[:, 1])
    return np.einsum("...k,kij->...ij", w, stack)


def schatten_power_mean(values: np.ndarray, p: float) -> np.ndarray:
    """Mean over the grid of ``(1/s) Tr |M|^p``; grid axes are the last four but two."""
    sv = np.linalg.svd(values, compute_uv=False)
    return np.mean(sv ** p, axis=(-3, -2, -1))


def grid_op_max(values: np.ndarray) -> tuple[float, tuple[int, int]]:
    sv = np.linalg.svd(values, compute_uv=False)[..., 0]
    idx = np.unravel_index(int(np.argmax(sv)), sv.shape)
    return float(sv[idx]), idx


def _auto_grid(degree: int, grid) -> QuadratureGrid:
    if grid is None:
        return QuadratureGrid.for_degree(degree)
    return grid if isinstance(grid, QuadratureGrid) else QuadratureGrid(int(grid))


def _lp_value(rep: MatrixRep, p: float, n: int) -> float:
    return float(schatten_power_mean(rep.on_grid(n), p)) ** (1.0 / p)


def lp_norm(x: QPoly, p: float, grid: QuadratureGrid | int | None = None) -> NormEstimate:
    """Noncommutative L_p norm at rational theta, ``1 <= p < inf``.

    ``delta`` is the change when the grid is doubled.  For even integer ``p``
    the quadrature is exact once ``grid >= p * degree + 1``.
    """
    if math.isinf(p):
        return op_norm(x, grid)
    if p < 1:
        raise ParameterError("p must be >= 1")
    rational_parts(x.theta)
    g = _auto_grid(x.degree, grid)
    if g.n < 2 * x.degree + 1:
        raise ParameterError(f"grid {g.n} below 2*degree+1 = {2 * x.degree + 1}")
    rep = represent(x)
    v = _lp_value(rep, p, g.n)
    v2 = _lp_value(rep, p, 2 * g.n)
    return NormEstimate(v, "approximate", grid=g.n, delta=abs(v2 - v))


def l2_norm(x: QPoly) -> float:
    return math.sqrt(sum(abs(c) ** 2 for c in x.coeffs.values()))


def refine_max(stack: np.ndarray, lattice: np.ndarray, n: int, start: tuple[int, int],
               steps: int, width: int = 2) -> tuple[float, float, tuple[float, float]]:
    """Local grid refinement of ``max_z ||sum z^m C_m||`` around a grid node.

    Returns ``(best, last_improvement, (t1, t2))`` with angles in radians.
    Every candidate is an exact evaluation, so ``best`` stays a lower bound.
    """
    h = 2 * np.pi / n
    t1, t2 = start[0] * h, start[1] * h
    best = float(np.linalg.norm(evaluate_at(stack, lattice, np.exp(1j * np.array(t1)),
                                            np.exp(1j * np.array(t2))), 2))
    last = 0.0
    offs = np.arange(-width, width + 1)
    for _ in range(steps):
        h /= 2 * width
        a1 = t1 + offs * h
        a2 = t2 + offs * h
        A1, A2 = np.meshgrid(a1, a2, indexing="ij")
        vals = evaluate_at(stack, lattice, np.exp(1j * A1), np.exp(1j * A2))
        sv = np.linalg.svd(vals, compute_uv=False)[..., 0]
        i, j = np.unravel_index(int(np.argmax(sv)), sv.shape)
        if sv[i, j] > best:
            last = float(sv[i, j]) - best
            best = float(sv[i, j])
            t1, t2 = A1[i, j], A2[i, j]
        else:
            last = 0.0
    return best, last, (float(t1), float(t2))


def stack_op_norm(stack: np.ndarray, lattice: np.ndarray, n: int,
                  refine_steps: int = 8, starts: int = 3) -> tuple[float, float]:
    """Grid maximum of the largest singular value, refined around the top nodes."""
    vals = grid_values(stack, lattice, n)
    sv = np.linalg.svd(vals, compute_uv=False)[..., 0]
    best, delta = float(sv.max()), 0.0
    if refine_steps <= 0:
        return best, delta
    order = np.argsort(sv, axis=None)[::-1][:starts]
    for flat in order:
        idx = np.unravel_index(int(flat), sv.shape)
        v, d, _ = refine_max(stack, lattice, n, idx, refine_steps)
        if v > best:
            best, delta = v, v - float(sv.max())
    return best, delta


def op_norm(x: QPoly, grid: QuadratureGrid | int | None = None,
            refine_steps: int = 8) -> NormEstimate:
    """Lower bound for the operator norm: grid sup plus local refinement."""
    rational_parts(x.theta)
    g = _auto_grid(x.degree, grid)
    rep = represent(x)
    if not rep.coeff_matrices:
        return NormEstimate(0.0, "lower", grid=g.n, delta=0.0)
    stack, lattice = rep.stack(), rep.lattice
    if g.n < 2 * x.degree + 1:
        raise ParameterError(f"grid {g.n} below 2*degree+1 = {2 * x.degree + 1}")
    v, delta = stack_op_norm(stack, lattice, g.n, refine_steps)
    return NormEstimate(v, "lower", grid=g.n, delta=delta)


def irrational_norm(x: QPoly, theta, p: float, ladder_len: int = 8,
                    grid: QuadratureGrid | int | None = None,
                    tol: float = 1e-3) -> NormEstimate:
    """Evaluate the coefficient data of ``x`` along convergents of ``theta``.

    Returns the last rung; the full ladder sits in ``ladder`` and
    ``transcript["stabilized"]`` records whether the final successive delta
    dropped below ``tol``.
    """
    from .diophantine import cf_convergents

    convs = cf_convergents(theta, ladder_len)
    rungs = []
    prev = None
    for c in convs:
        y = x.with_theta(Fraction(c.p, c.q))
        est = op_norm(y, grid) if math.isinf(p) else lp_norm(y, p, grid)
        step = None if prev is None else abs(est.value - prev)
        rungs.append({"p": c.p, "q": c.q, "value": est.value, "grid": est.grid,
                      "grid_delta": est.delta, "step": step})
        prev = est.value
    last_step = rungs[-1]["step"] if len(rungs) > 1 else None
    stabilized = last_step is not None and last_step < tol
    return NormEstimate(rungs[-1]["value"], "approximate", grid=rungs[-1].get("grid"),
                        delta=last_step, ladder=rungs,
                        transcript={"stabilized": stabilized, "tol": tol,
                                    "ladder_len": len(rungs)})


def matrix_amplified_lp(blocks: Mapping[tuple[int, int], np.ndarray], theta, p: float,
                        grid: int | None = None) -> float:
    """L_p norm of ``sum X_m (x) U^m V^n`` in ``M_k (x) L_p`` (normalized trace)."""
    a, b = rational_parts(theta)
    keys = sorted(blocks)
    lattice = np.array(keys, dtype=np.int64).reshape(-1, 2)
    stack = np.stack([np.kron(np.asarray(blocks[k]), basis_matrix(k[0], k[1], a, b))
                      for k in keys])
    deg = int(np.abs(lattice).max()) if len(keys) else 0
    n = grid or 4 * max(deg, 1) + 1
    vals = grid_values(stack, lattice, n)
    if math.isinf(p):
        return stack_op_norm(stack, lattice, n)[0]
    return float(schatten_power_mean(vals, p)) ** (1.0 / p)


def batch_lp(stacks: np.ndarray, lattice: np.ndarray, p: float, n: int) -> np.ndarray:
    """L_p norms of a batch of matrix-coefficient stacks ``(B, K, s, s)``."""
    vals = grid_values(stacks, lattice, n)
    if math.isinf(p):
        return np.linalg.svd(vals, compute_uv=False)[..., 0].max(axis=(-2, -1))
    return schatten_power_mean(vals, p) ** (1.0 / p)


def monomial_stack(lattice: Sequence[tuple[int, int]], a: int, b: int) -> np.ndarray:
    return np.stack([basis_matrix(int(m), int(n), a, b) for m, n in lattice])

"""Shared oracles and fixtures.

The dense oracles below rebuild the clock and shift matrices from scratch so
they share no code with the library's matrix model.
"""
from __future__ import annotations

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def clock_shift_oracle(a: int, b: int):
    k = np.arange(1, b + 1)
    D = np.diag(np.exp(2j * np.pi * a * k / b))
    S = np.zeros((b, b))
    for i in range(b):
        S[i, (i - 1) % b] = 1.0  # e_{k, k-1}
    return D, S


def dense_monomial(m: int, n: int, a: int, b: int) -> np.ndarray:
    D, S = clock_shift_oracle(a, b)
    return np.linalg.matrix_power(D, m % b) @ np.linalg.matrix_power(S, n % b)


def dense_coefficients(x, a: int, b: int) -> dict:
    """Matrix coefficients ``c D^m S^n`` of an algebra element."""
    return {mn: c * dense_monomial(mn[0], mn[1], a, b) for mn, c in x.coeffs.items()}


def dense_product(X: dict, Y: dict) -> dict:
    """Convolution of matrix-coefficient maps: the pointwise product in ``z``."""
    out: dict = {}
    for (m1, n1), A in X.items():
        for (m2, n2), B in Y.items():
            k = (m1 + m2, n1 + n2)
            out[k] = out.get(k, 0) + A @ B
    return out


def dense_read_back(C: dict, a: int, b: int) -> dict:
    return {mn: np.trace(M @ dense_monomial(mn[0], mn[1], a, b).conj().T) / b
            for mn, M in C.items()}


def dense_eval(x, a: int, b: int, z1: complex, z2: complex) -> np.ndarray:
    out = np.zeros((b, b), complex)
    for (m, n), c in x.coeffs.items():
        out += c * z1 ** m * z2 ** n * dense_monomial(m, n, a, b)
    return out


def fine_grid_lp(x, a: int, b: int, p: float, n: int) -> float:
    """Brute-force quadrature with eigenvalues of ``M^* M`` on an ``n x n`` grid."""
    t = np.exp(2j * np.pi * np.arange(n) / n)
    acc = 0.0
    peak = 0.0
    for z1 in t:
        for z2 in t:
            M = dense_eval(x, a, b, z1, z2)
            ev = np.clip(np.linalg.eigvalsh(M.conj().T @ M), 0, None)
            acc += np.sum(ev ** (p / 2)) / b if np.isfinite(p) else 0.0
            peak = max(peak, float(np.sqrt(ev.max())))
    if not np.isfinite(p):
        return peak
    return (acc / n ** 2) ** (1 / p)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

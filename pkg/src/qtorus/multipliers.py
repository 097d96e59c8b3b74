"""Fourier multipliers on the quantum torus and lower bounds for their norms.

Norm estimation is a nonconvex maximization of
``||M_phi x||_p / ||x||_p`` over polynomials supported in a box.  The search
runs projected gradient ascent on the unit sphere of coefficient space with
step halving, from monomials, warm starts, and seeded random restarts.  The
gradient of ``Tr |R|^p`` is ``p Re Tr(G^* dR)`` with ``G = W S^{p-1} Y^*``
from the SVD ``R = W S Y^*``, pulled back to coefficients by one FFT.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .algebra import ParameterError, QPoly, TrigPoly
from .matrix_model import (NormEstimate, grid_coefficients, grid_values,
                           monomial_stack, rational_parts, schatten_power_mean,
                           stack_op_norm)

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Symbol:
    """A function ``Z^d -> C`` driving a Fourier multiplier.

    ``func`` takes an integer array of shape ``(K, d)`` and returns ``K``
    complex values.  ``period`` and ``support`` (inclusive half-widths of a
    box outside which the symbol vanishes) are optional declarations.
    """

    d: int
    func: Evaluator
    period: tuple[int, ...] | None = None
    support: tuple[int, ...] | None = None
    name: str = "symbol"

    def values(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.int64).reshape(-1, self.d)
        return np.asarray(self.func(pts), dtype=complex).reshape(len(pts))

    def __call__(self, *m) -> complex:
        if len(m) == 1 and np.ndim(m[0]) == 1:
            m = tuple(m[0])
        if len(m) != self.d:
            raise ParameterError(f"symbol has dimension {self.d}")
        return complex(self.values([m])[0])

    def scaled(self, c: complex) -> "Symbol":
        f = self.func
        return Symbol(self.d, lambda pts: c * f(pts), self.period, self.support,
                      f"{c}*{self.name}")

    def times(self, other: "Symbol") -> "Symbol":
        if other.d != self.d:
            raise ParameterError("dimension mismatch")
        f, g = self.func, other.func
        return Symbol(self.d, lambda pts: f(pts) * g(pts), None, None,
                      f"{self.name}*{other.name}")

    def check_period(self, rng: np.random.Generator, trials: int = 64,
                     radius: int = 50) -> bool:
        if self.period is None:
            return True
        pts = rng.integers(-radius, radius + 1, size=(trials, self.d))
        shift = rng.integers(-3, 4, size=(trials, self.d)) * np.asarray(self.period)
        return bool(np.allclose(self.values(pts), self.values(pts + shift), atol=0, rtol=0))

    def check_support(self, rng: np.random.Generator, trials: int = 64) -> bool:
        if self.support is None:
            return True
        box = np.asarray(self.support)
        pts = rng.integers(-3 * box - 3, 3 * box + 4, size=(trials, self.d))
        outside = np.any(np.abs(pts) > box, axis=1)
        return bool(np.all(self.values(pts[outside]) == 0))


def constant_symbol(c: complex = 1.0, d: int = 2) -> Symbol:
    return Symbol(d, lambda pts: np.full(len(pts), c, dtype=complex), name=f"const:{c}")


def fejer_symbol(n: int, d: int = 2) -> Symbol:
    """``F_n^d(m) = prod_i (1 - |m_i|/n)^+``."""
    if n < 1:
        raise ParameterError("Fejer order must be positive")

    def f(pts):
        return np.prod(np.clip(1.0 - np.abs(pts) / n, 0.0, None), axis=1).astype(complex)

    return Symbol(d, f, support=(n - 1,) * d, name=f"fejer:{n}")


def dirichlet_symbol(n: int, d: int = 2) -> Symbol:
    """Indicator of the box ``|m_i| <= n``."""
    def f(pts):
        return np.all(np.abs(pts) <= n, axis=1).astype(complex)

    return Symbol(d, f, support=(n,) * d, name=f"dirichlet:{n}")


def pisier_symbol(seed: int, blocks: int) -> Symbol:
    """Heuristic 1-D family: ``e^{i a_j k}`` on dyadic block ``j`` with random ``a_j``.

    Block 0 is ``{0}``; block ``j >= 1`` is ``2^{j-1} <= |k| < 2^j``.  The
    symbol vanishes beyond the last block.  This is a probe family only.
    """
    alphas = np.random.default_rng(seed).uniform(0, 2 * np.pi, size=blocks + 1)

    def f(pts):
        k = pts[:, 0]
        a = np.abs(k)
        j = np.where(a == 0, 0, np.floor(np.log2(np.maximum(a, 1))).astype(np.int64) + 1)
        out = np.exp(1j * alphas[np.minimum(j, blocks)] * k)
        return np.where(j <= blocks, out, 0)

    half = 2 ** blocks - 1
    return Symbol(1, f, support=(half,), name=f"pisier:{seed}:{blocks}")


def tensor_one(phi: Symbol) -> Symbol:
    """``(phi (x) 1)(m, n) = phi(m)`` for a 1-D symbol."""
    if phi.d != 1:
        raise ParameterError("tensor_one expects a 1-D symbol")
    f = phi.func
    period = None if phi.period is None else (phi.period[0], 1)
    return Symbol(2, lambda pts: f(pts[:, :1]), period, None, f"{phi.name}(x)1")


def table_symbol(d: int, values: Mapping[tuple[int, ...], complex],
                 period: Sequence[int] | None = None,
                 support: Sequence[int] | None = None, name: str = "table") -> Symbol:
    table = {tuple(int(v) for v in k): complex(c) for k, c in values.items()}
    per = None if period is None else tuple(int(v) for v in period)

    def f(pts):
        if per is not None:
            pts = np.mod(pts, per)
        return np.array([table.get(tuple(int(v) for v in p), 0j) for p in pts], complex)

    return Symbol(d, f, per, None if support is None else tuple(support), name)


def load_symbol(desc, d: int = 2) -> Symbol:
    """Build a symbol from a builtin name or a JSON-style mapping.

    Builtins: ``fejer:n``, ``dirichlet:n``, ``pisier:seed:blocks`` (1-D,
    lifted as ``phi (x) 1`` when ``d == 2``).
    """
    if isinstance(desc, str):
        if desc.lstrip().startswith("{"):
            return load_symbol(json.loads(desc), d)
        parts = desc.split(":")
        kind = parts[0]
        try:
            if kind == "fejer":
                return fejer_symbol(int(parts[1]), d)
            if kind == "dirichlet":
                return dirichlet_symbol(int(parts[1]), d)
            if kind == "pisier":
                phi = pisier_symbol(int(parts[1]), int(parts[2]))
                return tensor_one(phi) if d == 2 else phi
        except (IndexError, ValueError) as exc:
            raise ParameterError(f"malformed symbol {desc!r}") from exc
        raise ParameterError(f"unknown symbol {desc!r}")
    dim = int(desc.get("d", d))
    values = {}
    for row in desc["values"]:
        *idx, re, im = row
        values[tuple(int(v) for v in idx)] = complex(re, im)
    return table_symbol(dim, values, desc.get("period"), desc.get("support"),
                        desc.get("name", "table"))


def apply(phi: Symbol, x):
    """``M_phi``: multiply the coefficient at ``m`` by ``phi(m)``.

    Accepts a :class:`QPoly` with a 2-D symbol or a :class:`TrigPoly` with a
    1-D symbol.
    """
    if isinstance(x, TrigPoly):
        if phi.d != 1:
            raise ParameterError("circle multipliers need a 1-D symbol")
        keys = list(x.coeffs)
        vals = phi.values([[k] for k in keys]) if keys else []
        return TrigPoly({k: x.coeffs[k] * v for k, v in zip(keys, vals) if v != 0})
    if phi.d != 2:
        raise ParameterError("quantum-torus multipliers need a 2-D symbol")
    keys = list(x.coeffs)
    if not keys:
        return x
    vals = phi.values(keys)
    return QPoly(x.theta, {k: x.coeffs[k] * v for k, v in zip(keys, vals) if v != 0}, x.prune)


# -- optimization -------------------------------------------------------------------

@dataclass
class OptimizerConfig:
    """Settings for the multi-restart ascent; the defaults reproduce the CLI."""

    restarts: int = 16
    iterations: int = 500
    seed: int = 0
    gradient: str = "adjoint"  # or "fd"
    fd_step: float = 1e-5
    init_step: float = 0.5
    min_step: float = 1e-9
    inf_proxy: float = 64.0
    grid: int | None = None
    final_rtol: float = 1e-10
    final_max_grid: int = 257
    refine_steps: int = 10

    def to_dict(self) -> dict:
        return asdict(self)


def box_lattice(degree: int) -> np.ndarray:
    r = np.arange(-degree, degree + 1)
    M, N = np.meshgrid(r, r, indexing="ij")
    return np.stack([M.ravel(), N.ravel()], axis=1)


def _is_even_int(p: float) -> bool:
    return not math.isinf(p) and float(p).is_integer() and int(p) % 2 == 0


def _opt_grid(p: float, degree: int, cfg: OptimizerConfig) -> int:
    if cfg.grid is not None:
        return cfg.grid
    if _is_even_int(p) and p <= 8:
        return max(4, int(p)) * degree + 1
    return 8 * degree + 1


class _Model:
    """Matrix model of block polynomials ``sum_m X_m (x) U^m V^n`` on a box."""

    def __init__(self, lattice: np.ndarray, theta, level: int):
        a, b = rational_parts(theta)
        self.lattice = lattice
        self.P = monomial_stack(lattice, a, b)
        self.b, self.k = b, level
        self.s = level * b

    def blocks(self, X: np.ndarray) -> np.ndarray:
        K, k = len(self.lattice), self.k
        out = np.einsum("...Krs,Kab->...Krasb", X, self.P)
        return out.reshape(*X.shape[:-3], K, self.s, self.s)

    def power_mean(self, X, p: float, n: int) -> float:
        return float(schatten_power_mean(grid_values(self.blocks(X), self.lattice, n), p))

    def power_mean_grad(self, X, p: float, n: int) -> tuple[float, np.ndarray]:
        vals = grid_values(self.blocks(X), self.lattice, n)
        W, sv, Yh = np.linalg.svd(vals)
        F = float(np.mean(sv ** p))
        G = (W * (sv ** (p - 1))[..., None, :]) @ Yh
        Gh = grid_coefficients(G, self.lattice)
        Gh = Gh.reshape(len(self.lattice), self.k, self.b, self.k, self.b)
        g = (p / self.s) * np.einsum("Krasb,Kab->Krs", Gh, self.P.conj())
        return F, g

    def op_norm(self, X, n: int, refine_steps: int) -> float:
        return stack_op_norm(self.blocks(X), self.lattice, n, refine_steps)[0]


def _normalize(X: np.ndarray) -> np.ndarray:
    return X / np.linalg.norm(X)


def _fd_grad(f: Callable[[np.ndarray], float], X: np.ndarray, h: float) -> np.ndarray:
    g = np.zeros_like(X)
    flat = X.reshape(-1)
    gflat = g.reshape(-1)
    for i in range(flat.size):
        for unit, part in ((1.0, 1.0), (1j, 1j)):
            Xp = flat.copy()
            Xm = flat.copy()
            Xp[i] += h * unit
            Xm[i] -= h * unit
            d = (f(Xp.reshape(X.shape)) - f(Xm.reshape(X.shape))) / (2 * h)
            gflat[i] += d * part
    return g


class _RatioObjective:
    """``(1/p) (log F(w X) - log F(X))`` with ``F`` the p-th power mean."""

    def __init__(self, model: _Model, weights: np.ndarray, p: float, n: int):
        self.model, self.w, self.p, self.n = model, weights, p, n

    def value(self, X) -> float:
        num = self.model.power_mean(self.w[:, None, None] * X, self.p, self.n)
        den = self.model.power_mean(X, self.p, self.n)
        return (math.log(num) - math.log(den)) / self.p

    def value_grad(self, X):
        WX = self.w[:, None, None] * X
        Fn, gn = self.model.power_mean_grad(WX, self.p, self.n)
        Fd, gd = self.model.power_mean_grad(X, self.p, self.n)
        val = (math.log(Fn) - math.log(Fd)) / self.p
        grad = (self.w.conj()[:, None, None] * gn / Fn - gd / Fd) / self.p
        return val, grad


class _FunctionalObjective:
    """``log |sum_m w_m x_m| - (1/p) log F(x)`` for the functional ``s_phi``."""

    def __init__(self, model: _Model, weights: np.ndarray, p: float, n: int):
        self.model, self.w, self.p, self.n = model, weights, p, n

    def value(self, X) -> float:
        L = np.sum(self.w * X[:, 0, 0])
        return math.log(abs(L)) - math.log(self.model.power_mean(X, self.p, self.n)) / self.p

    def value_grad(self, X):
        L = np.sum(self.w * X[:, 0, 0])
        F, g = self.model.power_mean_grad(X, self.p, self.n)
        grad = -g / (F * self.p)
        grad[:, 0, 0] += np.conj(self.w / L)
        return math.log(abs(L)) - math.log(F) / self.p, grad


def _ascend(obj, X0: np.ndarray, cfg: OptimizerConfig) -> tuple[float, np.ndarray, int]:
    """Normalized gradient ascent on the unit sphere with step halving."""
    X = _normalize(X0)
    if cfg.gradient == "fd":
        f, g = obj.value(X), _fd_grad(obj.value, X, cfg.fd_step)
    else:
        f, g = obj.value_grad(X)
    step = cfg.init_step
    it = 0
    for it in range(1, cfg.iterations + 1):
        # scale invariance: strip the radial component
        g = g - np.real(np.vdot(X, g)) * X
        gn = np.linalg.norm(g)
        if not np.isfinite(gn) or gn == 0:
            break
        d = g / gn
        accepted = False
        while step >= cfg.min_step:
            Xn = _normalize(X + step * d)
            fn = obj.value(Xn)
            if np.isfinite(fn) and fn > f:
                accepted = True
                break
            step /= 2
        if not accepted:
            break
        X, f = Xn, fn
        if cfg.gradient == "fd":
            g = _fd_grad(obj.value, X, cfg.fd_step)
        else:
            _, g = obj.value_grad(X)
        step = min(2 * step, cfg.init_step)
    return f, X, it


def _final_ratio(model: _Model, w: np.ndarray, X: np.ndarray, p: float, n0: int,
                 cfg: OptimizerConfig, functional: bool = False) -> tuple[float, int, float]:
    """Re-evaluate the true objective at the witness; returns ``(value, grid, delta)``."""
    deg = int(np.abs(model.lattice).max())
    if math.isinf(p):
        n = max(n0, 16 * deg + 1)
        den = model.op_norm(X, n, cfg.refine_steps)
        if functional:
            num = abs(np.sum(w * X[:, 0, 0]))
        else:
            num = model.op_norm(w[:, None, None] * X, n, cfg.refine_steps)
        return num / den, n, 0.0

    def at(n):
        den = model.power_mean(X, p, n) ** (1 / p)
        if functional:
            return abs(np.sum(w * X[:, 0, 0])) / den
        return model.power_mean(w[:, None, None] * X, p, n) ** (1 / p) / den

    if _is_even_int(p) and n0 >= int(p) * deg + 1:
        return at(n0), n0, 0.0
    n = max(n0, 4 * deg + 1)
    v = at(n)
    delta = math.inf
    while 2 * n - 1 <= cfg.final_max_grid:
        n = 2 * n - 1
        v2 = at(n)
        delta = abs(v2 - v)
        v = v2
        if delta <= cfg.final_rtol * abs(v):
            break
    return v, n, delta


def _search(phi: Symbol, p: float, theta, degree: int, level: int, cfg: OptimizerConfig,
            warm_start: Iterable[np.ndarray] = (), functional: bool = False) -> NormEstimate:
    if phi.d == 1:
        phi = tensor_one(phi)
    if p < 1:
        raise ParameterError("p must be >= 1")
    if degree < 1:
        raise ParameterError("degree must be >= 1")
    lattice = box_lattice(degree)
    K = len(lattice)
    w = phi.values(lattice)
    model = _Model(lattice, theta, level)
    p_opt = cfg.inf_proxy if math.isinf(p) else float(p)
    n_opt = _opt_grid(p_opt, degree, cfg)
    Obj = _FunctionalObjective if functional else _RatioObjective
    obj = Obj(model, w, p_opt, n_opt)

    # monomials are unitaries: the ratio at U^m V^n is exactly |phi(m, n)|
    j = int(np.argmax(np.abs(w)))
    best_val = float(np.abs(w[j]))
    best_X = np.zeros((K, level, level), complex)
    best_X[j] = np.eye(level) / math.sqrt(level)
    best_src, best_grid, best_delta = "monomial", None, 0.0
    if best_val == 0.0:
        return NormEstimate(0.0, "lower", witness=None,
                            transcript={"seed": cfg.seed, "restarts": 0, "iterations": 0,
                                        "discarded": 0, "source": "zero symbol"})

    starts: list[tuple[str, np.ndarray]] = []
    for i, X in enumerate(warm_start):
        X = np.asarray(X, complex).reshape(K, level, level)
        starts.append((f"warm{i}", X))
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        X = rng.normal(size=(K, level, level)) + 1j * rng.normal(size=(K, level, level))
        starts.append((f"restart{r}", X))

    discarded = 0
    total_it = 0
    history = []
    for label, X0 in starts:
        try:
            with np.errstate(all="raise"):
                f, X, it = _ascend(obj, X0, cfg)
        except (FloatingPointError, ValueError, np.linalg.LinAlgError):
            discarded += 1
            history.append({"start": label, "value": None})
            continue
        total_it += it
        if not np.isfinite(f):
            discarded += 1
            history.append({"start": label, "value": None})
            continue
        val, n_fin, delta = _final_ratio(model, w, X, p, n_opt, cfg, functional)
        history.append({"start": label, "value": val, "iterations": it})
        if val > best_val:
            best_val, best_X, best_src = val, X, label
            best_grid, best_delta = n_fin, delta

    witness = None
    if level == 1:
        witness = QPoly(theta, {(int(m), int(n)): complex(c) for (m, n), c
                                in zip(lattice, best_X[:, 0, 0]) if c != 0})
    else:
        witness = {"lattice": lattice.tolist(),
                   "blocks": [[[complex(v).real, complex(v).imag] for v in row]
                              for blk in best_X for row in blk]}
    return NormEstimate(
        float(best_val), "lower", grid=best_grid, delta=best_delta, witness=witness,
        transcript={"seed": cfg.seed, "restarts": cfg.restarts, "iterations": total_it,
                    "discarded": discarded, "source": best_src, "p": p,
                    "p_optimized": p_opt, "grid_optimized": n_opt, "degree": degree,
                    "level": level, "history": history, "coefficients": best_X},
    )


def _clean(est: NormEstimate) -> NormEstimate:
    """Drop the raw coefficient array from the transcript (kept on ``raw_witness``)."""
    raw = est.transcript.pop("coefficients", None)
    est.raw_witness = raw  # type: ignore[attr-defined]
    return est


def cb_lower_bound(phi: Symbol, p: float, theta, degree: int, level: int = 1,
                   opt: OptimizerConfig | None = None,
                   warm_start: Iterable[np.ndarray] = ()) -> NormEstimate:
    """Lower bound on ``||Id_k (x) M_phi||`` over block polynomials of the given degree.

    Levels above one are warm-started from the level-1 optimum embedded in
    the corner block, so the result never drops below the level-1 value.
    """
    cfg = opt or OptimizerConfig()
    if level < 1:
        raise ParameterError("level must be >= 1")
    warm = list(warm_start)
    if level > 1:
        base = cb_lower_bound(phi, p, theta, degree, 1, cfg)
        X1 = base.raw_witness  # type: ignore[attr-defined]
        lifted = np.zeros((len(X1), level, level), complex)
        lifted[:, 0, 0] = X1[:, 0, 0]
        warm.insert(0, lifted)
    est = _clean(_search(phi, p, theta, degree, level, cfg, warm))
    if level > 1:
        est.transcript["level1_value"] = base.value
    return est


def norm_lower_bound(phi: Symbol, p: float, theta, degree: int,
                     opt: OptimizerConfig | None = None,
                     warm_start: Iterable[np.ndarray] = ()) -> NormEstimate:
    """Lower bound on ``||M_phi : L_p -> L_p||`` from polynomials of the given degree.

    For ``p = inf`` the ascent runs on the ``L_{inf_proxy}`` surrogate and the
    reported value is the refined operator-norm ratio at the witness.
    """
    return cb_lower_bound(phi, p, theta, degree, 1, opt, warm_start)


def s_phi_lower_bound(phi: Symbol, theta, degree: int,
                      opt: OptimizerConfig | None = None) -> NormEstimate:
    """Lower bound on the norm of ``x -> sum_m phi(m) x(m)`` against the operator norm."""
    cfg = opt or OptimizerConfig()
    return _clean(_search(phi, math.inf, theta, degree, 1, cfg, functional=True))


def degree_scan(phi: Symbol, p: float, theta, degrees: Sequence[int],
                opt: OptimizerConfig | None = None) -> list[NormEstimate]:
    """Estimates for increasing degrees, each warm-started from the previous witness.

    Values are made literally nondecreasing by keeping the best seen so far.
    """
    out: list[NormEstimate] = []
    prev = None
    prev_deg = None
    for d in degrees:
        warm = []
        if prev is not None:
            X = np.zeros(((2 * d + 1) ** 2, 1, 1), complex)
            lat = box_lattice(d)
            index = {(int(m), int(n)): i for i, (m, n) in enumerate(lat)}
            for (m, n), c in zip(box_lattice(prev_deg), prev.raw_witness[:, 0, 0]):
                X[index[(int(m), int(n))], 0, 0] = c
            warm.append(X)
        est = norm_lower_bound(phi, p, theta, d, opt, warm)
        if prev is not None and prev.value > est.value:
            est.value = prev.value
            est.transcript["carried_from_degree"] = prev_deg
        out.append(est)
        prev, prev_deg = est, d
    return out

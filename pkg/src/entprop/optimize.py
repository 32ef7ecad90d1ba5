"""Grid-plus-simplex maximization of the monogamy score and derived searches."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import bisect, minimize

from .channels import NoisePlacement
from .protocol import ProtocolSpec, Scheme, protocol_delta
from .states import AuxiliaryParams, ResourceParams

MAX_DIM = 8
GRID_POINTS = 13
GRID_BUDGET = 4096
N_STARTS = 3
XATOL = 1e-6
FATOL = 1e-10


class CapacityError(ValueError):
    pass


@dataclass
class OptimizationProblem:
    objective: Callable[[np.ndarray], float]
    bounds: list[tuple[float, float]]
    names: list[str] = field(default_factory=list)
    grid_points: int = GRID_POINTS
    starts: int = N_STARTS
    threads: int = 1

    @property
    def dim(self) -> int:
        return len(self.bounds)


@dataclass(frozen=True)
class OptimizationResult:
    best_params: np.ndarray
    best_value: float
    evaluations: int
    grid_best: float
    names: tuple[str, ...] = ()

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.best_params)))


def _grid_axes(bounds, points):
    d = len(bounds)
    per_dim = max(2, min(points, int(math.floor(GRID_BUDGET ** (1 / d) + 1e-9))))
    return [np.linspace(lo, hi, per_dim) if hi > lo else np.array([lo]) for lo, hi in bounds]


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


def maximize(problem: OptimizationProblem) -> OptimizationResult:
    """Coarse grid, then bounded Nelder-Mead from the best few grid points.

    Grid size per dimension is capped so the whole grid stays within
    ``GRID_BUDGET`` evaluations. Ties on the grid go to the lexicographically
    smallest parameter vector.
    """
    d = problem.dim
    if d == 0:
        v = float(problem.objective(np.zeros(0)))
        return OptimizationResult(np.zeros(0), v, 1, v, tuple(problem.names))
    if d > MAX_DIM:
        raise CapacityError(f"{d} free parameters exceed the limit of {MAX_DIM}")
    lo = np.array([b[0] for b in problem.bounds], dtype=float)
    hi = np.array([b[1] for b in problem.bounds], dtype=float)
    if np.any(hi < lo):
        raise ValueError("each bound must satisfy lower <= upper")

    count = 0

    def f(x):
        nonlocal count
        count += 1
        return float(problem.objective(np.clip(x, lo, hi)))

    pts = [np.array(x) for x in itertools.product(*_grid_axes(problem.bounds, problem.grid_points))]
    vals = np.array(_map(f, pts, problem.threads))
    # product() already yields lexicographic order, so a stable sort on -value breaks ties correctly
    order = np.argsort(-vals, kind="stable")
    grid_best = float(vals[order[0]])
    best_x, best_v = pts[order[0]], grid_best

    free = hi > lo
    starts = [pts[i] for i in order[: problem.starts]]

    def refine(x0):
        if not free.any():
            return x0, f(x0)
        sub_lo, sub_hi = lo[free], hi[free]

        def neg(y):
            x = x0.copy()
            x[free] = y
            return -f(x)

        res = minimize(neg, x0[free], method="Nelder-Mead", bounds=list(zip(sub_lo, sub_hi)),
                       options={"xatol": XATOL, "fatol": FATOL, "maxiter": 400 * d})
        x = x0.copy()
        x[free] = np.clip(res.x, sub_lo, sub_hi)
        return x, -float(res.fun)

    for x, v in _map(refine, starts, problem.threads):
        if v > best_v:
            best_x, best_v = x, v
    return OptimizationResult(np.asarray(best_x, dtype=float), best_v, count, grid_best, tuple(problem.names))


# -- problem builders --------------------------------------------------------

def _aux_from(x, k):
    return tuple(AuxiliaryParams(float(x[2 * i]), float(x[2 * i + 1])) for i in range(k))


def protocol_problem(base: ProtocolSpec, policy: str = "post-select", outcomes=None, nodal: str = "B",
                     free_aux: bool = True, free_lambda: bool = False, free_z: bool = False,
                     lambda_bounds=(0.0, 1.0), z_bounds=(0.0, math.pi / 4), grid_points: int = GRID_POINTS,
                     threads: int = 1) -> OptimizationProblem:
    """Maximize the protocol score over auxiliary angles and optionally lambda and z.

    Parameter order: (theta, phi) per B-side round, then per A-side round, then
    lambda (shared by both sides), then z.
    """
    k = base.n + base.m
    bounds, names = [], []
    if free_aux:
        for lab in [f"B{i}" for i in range(1, base.n + 1)] + [f"A{j}" for j in range(1, base.m + 1)]:
            bounds += [(0.0, math.pi), (0.0, 2 * math.pi)]
            names += [f"theta_{lab}", f"phi_{lab}"]
    if free_lambda:
        bounds.append(tuple(lambda_bounds))
        names.append("lambda")
    if free_z:
        bounds.append(tuple(z_bounds))
        names.append("z")

    def objective(x):
        changes = {}
        pos = 0
        if free_aux:
            aux = _aux_from(x, k)
            changes["aux_b"], changes["aux_a"] = aux[: base.n], aux[base.n:]
            pos = 2 * k
        if free_lambda:
            changes["lambda_b"] = changes["lambda_a"] = float(x[pos])
            pos += 1
        if free_z:
            changes["z"] = float(x[pos])
        return protocol_delta(replace(base, **changes), policy, outcomes, nodal)

    return OptimizationProblem(objective, bounds, names, grid_points, threads=threads)


def best_delta(base: ProtocolSpec, policy: str = "post-select", outcomes=None, **kw) -> OptimizationResult:
    return maximize(protocol_problem(base, policy, outcomes, **kw))


def _uni_spec(z, kind, p, lam, placement="B", n=1, scheme="unidirectional", m=0):
    return ProtocolSpec(scheme=Scheme(scheme), n=n, m=m, lambda_b=lam, z=z,
                        placement=NoisePlacement.parse(placement) if kind != "none" and p > 0 else NoisePlacement.NONE,
                        channel=kind if p > 0 else "none", p=p)


@dataclass(frozen=True)
class OptimalResource:
    z: float
    negativity: float
    delta: float
    params: dict


def optimal_resource(kind: str, p: float, lam: float, scheme: str = "unidirectional", placement: str = "B",
                     n: int = 1, m: int = 0, policy: str = "post-select", outcomes=None,
                     z_max: float = math.pi / 4, threads: int = 1) -> OptimalResource:
    """Resource angle maximizing the score jointly with the auxiliary angles."""
    base = _uni_spec(math.pi / 8, kind, p, lam, placement, n, scheme, m)
    res = best_delta(base, policy, outcomes, free_z=True, z_bounds=(0.0, z_max), threads=threads)
    z = float(res.best_params[-1])
    return OptimalResource(z, ResourceParams(z).negativity, res.best_value, res.as_dict())


def delta_curve(z: float, kind: str, p: float, lambdas: Sequence[float], placement: str = "B", n: int = 1,
                policy: str = "post-select", outcomes=None, optimize_aux: bool = True, threads: int = 1) -> np.ndarray:
    out = []
    for lam in lambdas:
        spec = _uni_spec(z, kind, p, float(lam), placement, n)
        if optimize_aux:
            out.append(best_delta(spec, policy, outcomes, threads=threads).best_value)
        else:
            out.append(protocol_delta(spec, policy, outcomes))
    return np.array(out)


def critical_lambda(z: float, p: float, kind: str = "adc", placement: str = "B", n: int = 1,
                    policy: str = "post-select", outcomes=None, optimize_aux: bool = True,
                    scan_points: int = 41, tol: float = 1e-6) -> float | None:
    """Unsharpness where the noisy score first overtakes the noiseless one.

    Scans an interior grid of (0, 1) for the first change of
    g = delta_noisy - delta_noiseless from negative to positive, then bisects.
    Returns None when p = 0 or no such crossing exists.
    """
    if p == 0 or kind == "none":
        return None

    def g(lam):
        a = delta_curve(z, kind, p, [lam], placement, n, policy, outcomes, optimize_aux)[0]
        b = delta_curve(z, "none", 0.0, [lam], placement, n, policy, outcomes, optimize_aux)[0]
        return a - b

    grid = np.linspace(0, 1, scan_points + 2)[1:-1]
    prev_lam, prev_g = None, None
    for lam in grid:
        val = g(lam)
        if abs(val) <= 1e-12:
            val = 0.0
        if prev_g is not None and prev_g < 0 < val:
            return float(bisect(g, prev_lam, lam, xtol=tol))
        if val != 0.0:
            prev_lam, prev_g = lam, val
    return None


@dataclass(frozen=True)
class RobustnessResult:
    delta_single: float
    delta_double: float

    @property
    def gap(self) -> float:
        return self.delta_single - self.delta_double

    @property
    def relative_percent(self) -> float:
        return 100 * self.gap / self.delta_single if self.delta_single > 0 else 0.0


def robustness_gap(z: float, p: float, kind: str = "dpc", n: int = 1, policy: str = "average",
                   threads: int = 1) -> RobustnessResult:
    """Averaged score maximized over aux angles and lambda, noise on B versus on both sites."""
    if p == 0:
        v = best_delta(_uni_spec(z, "none", 0.0, 0.5, "none", n), policy, free_lambda=True, threads=threads).best_value
        return RobustnessResult(v, v)
    single = best_delta(_uni_spec(z, kind, p, 0.5, "B", n), policy, free_lambda=True, threads=threads)
    double = best_delta(_uni_spec(z, kind, p, 0.5, "AB", n), policy, free_lambda=True, threads=threads)
    return RobustnessResult(single.best_value, double.best_value)

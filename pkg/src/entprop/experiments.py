"""Named experiments producing CSV series."""

from __future__ import annotations

import csv
import io
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import haar
from .channels import NoisePlacement
from .config import ExperimentConfig
from .optimize import best_delta, optimal_resource, robustness_gap
from .protocol import ProtocolSpec, Scheme, protocol_delta, run_branch
from .recursion import reassemble, run_recursion
from .states import AuxiliaryParams, ResourceParams, as_generator

COLUMNS = {
    "sweep-lambda": ["channel", "placement", "p", "lambda", "z", "outcome_policy", "delta"],
    "sweep-negativity": ["channel", "placement", "p", "lambda", "negativity_in", "delta"],
    "optimal-resource": ["channel", "p", "lambda", "z_opt", "negativity_opt", "delta_opt"],
    "avg-vs-p": ["channel", "placement", "p", "delta_avg_max"],
    "robustness": ["channel", "p", "negativity_in", "delta_single", "delta_double", "gap", "relative_gap_percent"],
    "haar-study": ["seed", "samples", "p", "lambda_policy", "fraction_advantage"],
    "compare-protocols": ["scheme", "p", "lambda", "delta_avg"],
    "verify-recursion": ["n", "max_frobenius_error", "max_prob_error"],
}

HAAR_LAMBDAS = np.linspace(0.05, 0.95, 19)


@dataclass
class ExperimentResult:
    name: str
    columns: list[str]
    rows: list[list]
    runtime: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
        return buf.getvalue()

    def summary(self) -> str:
        return f"{self.name}: {len(self.rows)} rows in {self.runtime:.2f} s"


def make_spec(cfg: ExperimentConfig, channel: str, placement: str, p: float, lam: float, z: float | None = None,
              scheme: str | None = None, n: int | None = None, m: int | None = None) -> ProtocolSpec:
    scheme = scheme or cfg.scheme
    n = cfg.n if n is None else n
    m = (cfg.m if scheme == "bidirectional" else 0) if m is None else m
    aux = AuxiliaryParams(cfg.aux_theta, cfg.aux_phi)
    noiseless = channel == "none" or p == 0 or placement == "none"
    return ProtocolSpec(
        scheme=Scheme(scheme), n=n, m=m, lambda_b=lam, aux_b=(aux,) * n, aux_a=(aux,) * m,
        z=cfg.z if z is None else z,
        placement=NoisePlacement.NONE if noiseless else NoisePlacement.parse(placement),
        channel="none" if noiseless else channel, p=0.0 if noiseless else p, p_other=cfg.p_other,
        max_qubits=cfg.max_qubits,
    )


def _outcomes(cfg):
    return tuple(cfg.outcomes) if cfg.outcomes else None


def score(cfg: ExperimentConfig, spec: ProtocolSpec, policy: str | None = None) -> float:
    policy = policy or cfg.outcome_policy
    if cfg.optimize_aux and spec.rounds > 0:
        return best_delta(spec, policy, _outcomes(cfg), grid_points=cfg.grid_points, threads=cfg.threads).best_value
    return protocol_delta(spec, policy, _outcomes(cfg))


def sweep_lambda(cfg):
    rows = []
    for ch in cfg.channel:
        for pl in cfg.placement:
            for p in cfg.p:
                for lam in cfg.lambdas:
                    d = score(cfg, make_spec(cfg, ch, pl, p, lam))
                    rows.append([ch, pl, p, lam, cfg.z, cfg.outcome_policy, d])
    return rows


def sweep_negativity(cfg):
    rows = []
    for ch in cfg.channel:
        for pl in cfg.placement:
            for p in cfg.p:
                for lam in cfg.lambdas:
                    for neg in cfg.negativity:
                        z = ResourceParams.from_negativity(neg).z
                        rows.append([ch, pl, p, lam, neg, score(cfg, make_spec(cfg, ch, pl, p, lam, z))])
    return rows


def optimal_resource_rows(cfg):
    rows = []
    pl = cfg.placement[0]
    for ch in cfg.channel:
        for p in cfg.p:
            for lam in cfg.lambdas:
                r = optimal_resource(ch, p, lam, cfg.scheme, pl, cfg.n, cfg.m if cfg.scheme == "bidirectional" else 0,
                                     cfg.outcome_policy, _outcomes(cfg), threads=cfg.threads)
                rows.append([ch, p, lam, r.z, r.negativity, r.delta])
    return rows


def avg_vs_p(cfg):
    rows = []
    for ch in cfg.channel:
        for pl in cfg.placement:
            for p in cfg.p:
                spec = make_spec(cfg, ch, pl, p, 0.5)
                res = best_delta(spec, "average", free_aux=cfg.optimize_aux, free_lambda=True,
                                 grid_points=cfg.grid_points, threads=cfg.threads)
                rows.append([ch, pl, p, res.best_value])
    return rows


def robustness_rows(cfg):
    rows = []
    for ch in cfg.channel:
        for p in cfg.p:
            for neg in cfg.negativity:
                z = ResourceParams.from_negativity(neg).z
                r = robustness_gap(z, p, ch, cfg.n, threads=cfg.threads)
                rows.append([ch, p, neg, r.delta_single, r.delta_double, r.gap, r.relative_percent])
    return rows


def haar_fractions(seed: int, samples: int, ps, policy: str, threads: int = 1, kind: str = "adc") -> dict:
    """Advantage fraction per p; under ``all-p`` a state counts only if it gains at every p."""
    noisy_ps = [p for p in ps if p > 0]
    _, flags = haar.haar_advantage(seed, samples, noisy_ps, HAAR_LAMBDAS, kind, threads=threads)
    out = {}
    if policy == "all-p":
        joint = np.logical_and.reduce([flags[p][0] for p in noisy_ps]) if noisy_ps else np.zeros(samples, bool)
        for p in ps:
            out[p] = float(joint.mean()) if p > 0 else 0.0
        return out
    col = 0 if policy == "any" else 1
    for p in ps:
        out[p] = float(flags[p][col].mean()) if p > 0 else 0.0
    return out


def haar_rows(cfg):
    kind = cfg.channel[0]
    fr = haar_fractions(cfg.seed, cfg.samples, cfg.p, cfg.lambda_policy, cfg.threads, kind)
    return [[cfg.seed, cfg.samples, p, cfg.lambda_policy, fr[p]] for p in cfg.p]


def compare_protocols(cfg):
    rows = []
    ch = cfg.channel[0]
    pl = cfg.placement[0]
    half = cfg.rounds // 2
    layouts = [("unidirectional", cfg.rounds, 0), ("bidirectional", cfg.rounds - half, half)]
    for scheme, n, m in layouts:
        for p in cfg.p:
            for lam in cfg.lambdas:
                spec = make_spec(cfg, ch, pl, p, lam, scheme=scheme, n=n, m=m)
                rows.append([scheme, p, lam, score(cfg, spec, "average")])
    return rows


def verify_recursion(cfg):
    rng = as_generator(cfg.seed)
    rows = []
    for n in cfg.recursion_rounds:
        frob = perr = 0.0
        for _ in range(cfg.trials):
            z = rng.uniform(0, math.pi / 4)
            p, lam = rng.uniform(), rng.uniform()
            aux = tuple(AuxiliaryParams(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)) for _ in range(n))
            outs = tuple(int(o) for o in rng.integers(1, 5, n))
            mat, prob = reassemble(run_recursion(z, p, aux, lam, outs))
            spec = ProtocolSpec(n=n, lambda_b=lam, aux_b=aux, z=z, placement="B", channel="pdc", p=p,
                                max_qubits=max(cfg.max_qubits, n + 2))
            br = run_branch(spec, outs)
            perr = max(perr, abs(prob - br.probability))
            if not br.degenerate:
                frob = max(frob, float(np.linalg.norm(mat / prob - br.state)))
        rows.append([n, frob, perr])
    return rows


RUNNERS: dict[str, Callable] = {
    "sweep-lambda": sweep_lambda,
    "sweep-negativity": sweep_negativity,
    "optimal-resource": optimal_resource_rows,
    "avg-vs-p": avg_vs_p,
    "robustness": robustness_rows,
    "haar-study": haar_rows,
    "compare-protocols": compare_protocols,
    "verify-recursion": verify_recursion,
}


def run_experiment(name: str, cfg: ExperimentConfig, out: str | Path | None = None) -> ExperimentResult:
    if name not in RUNNERS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(RUNNERS)}")
    t0 = time.perf_counter()
    rows = RUNNERS[name](cfg)
    res = ExperimentResult(name, COLUMNS[name], rows, time.perf_counter() - t0)
    text = res.to_csv()
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return res

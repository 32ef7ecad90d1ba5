"""The twelve acceptance checks, each returning an AcceptanceRecord."""

from __future__ import annotations

import itertools
import math
import time
from typing import Callable

import numpy as np

from .channels import CHANNEL_KINDS, make_channel
from .config import AcceptanceRecord, format_report
from .experiments import haar_fractions
from .measurement import measurement_operators, povm_elements
from .optimize import best_delta, critical_lambda, delta_curve, optimal_resource, robustness_gap
from .protocol import ProtocolSpec, enumerate_branches, protocol_delta
from .recursion import closed_form_delta, reassemble, run_recursion
from .protocol import run_branch
from .states import AuxiliaryParams, ResourceParams, as_generator

Z8 = math.pi / 8
Z4 = math.pi / 4
LAMBDA_GRID = np.linspace(0, 1, 41)
HAAR_SEED = 42
HAAR_SAMPLES = 10_000
HAAR_POLICY = "all-p"
HAAR_PS = (0.2, 0.4, 0.6, 0.8)


def _fmt(x, digits=6):
    return f"{x:.{digits}g}" if isinstance(x, float) else str(x)


def _record(cid, title, expected, measured, tol, ok, details=()):
    return AcceptanceRecord(cid, title, expected, measured, tol, "pass" if ok else "fail", 0.0, list(details))


def c01_constructive_adc() -> AcceptanceRecord:
    """Noisy curve overtakes the noiseless one above a crossing point."""
    clean = delta_curve(Z8, "none", 0.0, LAMBDA_GRID)
    ok, parts, details = True, [], []
    for p in (0.2, 0.4):
        noisy = delta_curve(Z8, "adc", p, LAMBDA_GRID)
        lc = critical_lambda(Z8, p, "adc")
        if lc is None:
            ok = False
            parts.append(f"p={p}: no crossing")
            continue
        mask = (LAMBDA_GRID > lc + 0.02) & (LAMBDA_GRID <= 0.98)
        good = bool(mask.any() and np.all(noisy[mask] > clean[mask]))
        ok &= good
        parts.append(f"p={p}: lambda_c={lc:.4f}")
        details.append(f"p={p}: min gain above lambda_c+0.02 = {np.min(noisy[mask] - clean[mask]):.3e}" if mask.any()
                       else f"p={p}: no grid point above lambda_c+0.02")
    return _record(1, "ADC noise raises the post-selected score above a crossing lambda_c",
                   "crossing in (0,1), noisy > noiseless on grid (lambda_c+0.02, 0.98]", "; ".join(parts),
                   "property", ok, details)


def c02_reversed_ordering() -> AcceptanceRecord:
    vals = {p: delta_curve(Z8, "adc" if p else "none", p, [0.9])[0] for p in (0.0, 0.2, 0.4)}
    ok = vals[0.4] > vals[0.2] > vals[0.0]
    measured = ", ".join(f"delta(p={p})={v:.5f}" for p, v in vals.items())
    return _record(2, "Stronger ADC gives a higher score at lambda=0.9",
                   "delta(0.4) > delta(0.2) > delta(0)", measured, "strict ordering", ok)


def _window(kind, p, lo, hi, step=0.01, tol=0.005):
    lams = np.round(np.arange(lo, hi + step / 2, step), 10)
    flags = [abs(optimal_resource(kind, p, float(l)).negativity - 0.5) <= tol for l in lams]
    inside = [l for l, f in zip(lams, flags) if f]
    return (float(min(inside)), float(max(inside))) if inside else None


def c03_optimal_windows() -> AcceptanceRecord:
    cases = [("none", 0.0, (0.45, 0.47, 0.49), (0.44, 0.50)), ("adc", 0.2, (0.40, 0.43, 0.46), (0.39, 0.47))]
    ok, parts, details = True, [], []
    for kind, p, points, (elo, ehi) in cases:
        negs = [optimal_resource(kind, p, l).negativity for l in points]
        pt_ok = all(abs(n - 0.5) <= 0.005 for n in negs)
        high = optimal_resource(kind, p, 0.8).negativity
        win = _window(kind, p, elo - 0.1, ehi + 0.1)
        win_ok = win is not None and abs(win[0] - elo) <= 0.02 and abs(win[1] - ehi) <= 0.02
        ok &= pt_ok and high < 0.45 and win_ok
        label = f"{kind} p={p}"
        parts.append(f"{label}: window {win}")
        details.append(f"{label}: N* at {points} = {[round(n, 5) for n in negs]}; N*(0.8) = {high:.4f}")
    return _record(3, "Maximally entangled resource is optimal only inside a lambda window",
                   "windows [0.44,0.50] and [0.39,0.47]; N*=0.5 at listed points; N*(0.8)<0.45",
                   "; ".join(parts), "N* within 0.005 of 0.5; endpoints within 0.02", ok, details)


def c04_bidirectional_values() -> AcceptanceRecord:
    best = optimal_resource("adc", 0.2, 0.8, "bidirectional", "B", 1, 1, "post-select", (3, 3))
    spec = ProtocolSpec(scheme="bidirectional", n=1, m=1, lambda_b=0.8, z=Z4, placement="B", channel="adc", p=0.2)
    at_max = best_delta(spec, "post-select", (3, 3)).best_value
    ok = abs(best.delta - 0.161) <= 0.005 and abs(best.negativity - 0.176) <= 0.01 and abs(at_max - 0.137) <= 0.005
    measured = f"delta*={best.delta:.5f} at N={best.negativity:.4f}; delta(z=pi/4)={at_max:.5f}"
    return _record(4, "Bidirectional post-selected optimum and maximally entangled value",
                   "0.161 at N=0.176; 0.137 at N=0.5", measured, "delta 0.005, N 0.01", ok)


def c05_robustness() -> AcceptanceRecord:
    targets = {0.5: 4.38, 0.2: 2.9}
    ok, parts, details = True, [], []
    for neg, expect in targets.items():
        r = robustness_gap(ResourceParams.from_negativity(neg).z, 0.4, "dpc", 1)
        ok &= abs(r.relative_percent - expect) <= 0.5
        parts.append(f"N={neg}: {r.relative_percent:.2f}%")
        details.append(f"N={neg}: single={r.delta_single:.5f} double={r.delta_double:.5f} gap={r.gap:.5f}")
    return _record(5, "Relative loss from a second depolarizing channel",
                   "4.38% at N=0.5, 2.9% at N=0.2", "; ".join(parts), "0.5 percentage points", ok, details)


def c06_haar_fraction(samples: int = HAAR_SAMPLES, threads: int = 1) -> AcceptanceRecord:
    fr = haar_fractions(HAAR_SEED, samples, HAAR_PS, HAAR_POLICY, threads)
    value = fr[HAAR_PS[0]]
    ok = 0.17 <= value <= 0.23
    return _record(6, "Fraction of Haar-random resources helped by ADC on B",
                   "fraction in [0.17, 0.23]", f"{value:.4f} ({samples} samples, seed {HAAR_SEED}, policy {HAAR_POLICY})",
                   "interval", ok)


def c07_hierarchy() -> AcceptanceRecord:
    ok, bad, worst = True, [], math.inf
    for pl in ("A", "B", "AB"):
        for p in (0.2, 0.4, 0.6):
            v = {k: best_delta(ProtocolSpec(n=1, z=Z8, placement=pl, channel=k, p=p), "average",
                               free_lambda=True).best_value for k in ("pdc", "adc", "dpc")}
            holds = v["pdc"] > v["adc"] > v["dpc"]
            worst = min(worst, v["pdc"] - v["adc"], v["adc"] - v["dpc"])
            if not holds:
                ok = False
                bad.append(f"{pl}/p={p}: {v}")
    return _record(7, "Optimized averaged score ordered PDC > ADC > DPC",
                   "strict ordering at 9 (placement, p) points", f"smallest margin {worst:.3e}" + (
                       f"; violations {bad}" if bad else ""), "strict ordering", ok)


def c08_pdc_symmetry() -> AcceptanceRecord:
    worst = 0.0
    for aux in (AuxiliaryParams(), AuxiliaryParams(math.pi / 3, math.pi / 5)):
        for p in np.linspace(0.1, 0.9, 5):
            for lam in np.linspace(0.1, 0.9, 5):
                a, b = (protocol_delta(ProtocolSpec(n=1, lambda_b=float(lam), aux_b=(aux,), z=Z8, placement=pl,
                                                    channel="pdc", p=float(p)), "average") for pl in ("A", "B"))
                worst = max(worst, abs(a - b))
    return _record(8, "PDC on A or on B gives the same averaged score",
                   "|delta(A) - delta(B)| = 0", f"max difference {worst:.3e}", "1e-10", worst <= 1e-10)


def c09_recursion() -> AcceptanceRecord:
    rng = as_generator(2024)
    frob = perr = 0.0
    for n in (1, 2, 3):
        for _ in range(10):
            z, p, lam = rng.uniform(0, Z4), rng.uniform(), rng.uniform()
            aux = tuple(AuxiliaryParams(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)) for _ in range(n))
            outs = tuple(int(o) for o in rng.integers(1, 5, n))
            mat, prob = reassemble(run_recursion(z, p, aux, lam, outs))
            br = run_branch(ProtocolSpec(n=n, lambda_b=lam, aux_b=aux, z=z, placement="B", channel="pdc", p=p), outs)
            perr = max(perr, abs(prob - br.probability))
            frob = max(frob, float(np.linalg.norm(mat / prob - br.state)))
    ok = frob < 1e-10 and perr < 1e-10
    return _record(9, "Block recursion reproduces the simulated PDC branches",
                   "Frobenius and probability errors 0", f"Frobenius {frob:.2e}, probability {perr:.2e}", "1e-10", ok)


def c10_closed_form() -> AcceptanceRecord:
    worst = 0.0
    for lam in np.linspace(0.6, 0.95, 8):
        for p in (0.1, 0.2, 0.4):
            spec = ProtocolSpec(n=1, lambda_b=float(lam), z=Z8, placement="B", channel="adc", p=p)
            worst = max(worst, abs(closed_form_delta(Z8, p, float(lam)) - protocol_delta(spec)))
    return _record(10, "Closed-form score matches the simulated outcome-3 branch",
                   "difference 0", f"max difference {worst:.2e}", "1e-8", worst <= 1e-8)


def c11_limits() -> AcceptanceRecord:
    worst_delta = worst_complete = worst_prob = 0.0
    layouts = [("unidirectional", 1, 0), ("unidirectional", 2, 0), ("bidirectional", 1, 1)]
    auxes = (AuxiliaryParams(), AuxiliaryParams(1.1, 0.7))
    for kind in CHANNEL_KINDS:
        for (scheme, n, m), lam, aux in itertools.product(layouts, (0.0, 1.0), auxes):
            for pl in ("A", "B", "AB"):
                spec = ProtocolSpec(scheme=scheme, n=n, m=m, lambda_b=lam, aux_b=(aux,) * n, aux_a=(aux,) * m,
                                    z=Z8, placement=pl if kind != "none" else "none", channel=kind, p=0.3)
                branches = enumerate_branches(spec)
                worst_prob = max(worst_prob, abs(sum(b.probability for b in branches) - 1))
                for b in branches:
                    if not b.degenerate:
                        worst_delta = max(worst_delta, abs(protocol_delta(spec, outcomes=b.outcomes)))
                worst_delta = max(worst_delta, abs(protocol_delta(spec, "average")))
    for lam in np.linspace(0, 1, 21):
        worst_complete = max(worst_complete, float(np.abs(povm_elements(lam).sum(0) - np.eye(4)).max()))
        ops = measurement_operators(lam)
        worst_complete = max(worst_complete, float(np.abs(sum(o.conj().T @ o for o in ops) - np.eye(4)).max()))
        for kind in CHANNEL_KINDS:
            worst_complete = max(worst_complete, make_channel(kind, lam).completeness_residual())
    ok = worst_delta <= 1e-10 and worst_complete < 1e-12 and worst_prob <= 1e-9
    measured = f"|delta| {worst_delta:.2e}, completeness {worst_complete:.2e}, probability sum {worst_prob:.2e}"
    return _record(11, "Limits and completeness", "delta=0 at lambda in {0,1}; residuals 0; sums 1", measured,
                   "1e-10 / 1e-12 / 1e-9", ok)


def c12_uni_vs_bi() -> AcceptanceRecord:
    ok, parts = True, []
    for kind in ("adc", "pdc", "dpc"):
        uni = best_delta(ProtocolSpec(n=2, z=Z8, placement="B", channel=kind, p=0.4), "average",
                         free_lambda=True).best_value
        bi = best_delta(ProtocolSpec(scheme="bidirectional", n=1, m=1, z=Z8, placement="B", channel=kind, p=0.4),
                        "average", free_lambda=True).best_value
        ok &= uni > bi
        parts.append(f"{kind}: uni {uni:.5f} vs bi {bi:.5f}")
    return _record(12, "Two unidirectional rounds beat one round on each side",
                   "max averaged score U > B for every channel", "; ".join(parts), "strict", ok)


CRITERIA: dict[int, Callable[[], AcceptanceRecord]] = {
    1: c01_constructive_adc, 2: c02_reversed_ordering, 3: c03_optimal_windows, 4: c04_bidirectional_values,
    5: c05_robustness, 6: c06_haar_fraction, 7: c07_hierarchy, 8: c08_pdc_symmetry, 9: c09_recursion,
    10: c10_closed_form, 11: c11_limits, 12: c12_uni_vs_bi,
}


def run_criterion(cid: int) -> AcceptanceRecord:
    t0 = time.perf_counter()
    rec = CRITERIA[cid]()
    rec.runtime = time.perf_counter() - t0
    return rec


def run_acceptance(ids=None, with_runtime: bool = False) -> tuple[list[AcceptanceRecord], str]:
    records = [run_criterion(i) for i in (ids or sorted(CRITERIA))]
    return records, format_report(records, with_runtime)

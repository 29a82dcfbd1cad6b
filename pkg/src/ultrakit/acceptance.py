"""The acceptance suite: ten in-process criteria plus CLI determinism.

Each ``criterion_k(seed)`` returns a CriterionResult whose ``metrics`` hold
only deterministic numbers, so reports built from them are byte-stable.
Criterion 11 (two identical CLI runs) lives in the test-suite because it
needs two processes.
"""
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import approxconv as ac
from . import convolutor as cv
from . import gaussalg as ga
from . import gsnorms as gn
from . import stft as st
from . import tmib
from . import weightseq as ws
from .fixtures import (distribution_fixtures, gaussian_fixtures, probe_functions, random_gauss,
                       random_seqrep_entries)
from .grids import FreqGrid, XGrid

WIDE_GRID = XGrid(20.0, 0.01)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    metrics: dict
    violations: list = field(default_factory=list)
    tails: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.number:2d}: {self.name}"

    def as_dict(self):
        from .reports import to_plain
        return {"number": self.number, "name": self.name, "passed": bool(self.passed),
                "metrics": to_plain(self.metrics), "tails": to_plain(self.tails)}


def _rng(seed, k):
    return np.random.default_rng([int(seed), int(k)])


def _tail_summary(reports):
    """Counts and worst tail/value ratio over CheckReports carrying ``details['tails']``."""
    n = ok = 0
    worst = 0.0
    for r in reports:
        for t in r.details.get("tails", []):
            n += 1
            ok += bool(t["certified"])
            if t["value"] > 0:
                worst = max(worst, t["tail"] / t["value"])
    return {"checked": n, "certified": ok, "worst_relative_tail": worst}


# ---------------------------------------------------------------- 1-3: STFT

def criterion_1(seed=0):
    w = st.build_window(ga.GaussSum.gaussian(math.pi))
    x = np.linspace(-6, 6, 241)
    shape_err = float(np.max(np.abs(w.psi(x) - np.exp(-math.pi * x * x / 2))))
    m = {"psi_norm_sq": w.l2_norm_sq, "norm_error": abs(w.l2_norm_sq - 1.0), "lambda": w.lam,
         "lambda_error": abs(w.lam - 0.5), "psi_shape_error": shape_err}
    ok = m["norm_error"] <= 1e-10 and m["lambda_error"] <= 1e-12 and shape_err <= 1e-12
    return CriterionResult(1, "window identity", ok, m)


def criterion_2(seed=0, deltas=(0.32, 0.16, 0.08, 0.04, 0.02, 0.01, 0.005), floor=1e-9, anchor=0.02):
    t0 = time.perf_counter()
    w = st.build_window(ga.GaussSum.gaussian(math.pi))
    probes = np.linspace(-4.0, 4.0, 33)
    rows, ok = {}, True
    for name, f in gaussian_fixtures().items():
        errs = [st.reconstruct_check(f, w, FreqGrid(8.0, d), probes) for d in deltas]
        halving = all(e1 <= floor or e0 <= floor or e1 <= e0 / 4.0 for e0, e1 in zip(errs, errs[1:]))
        rows[name] = {"errors": errs, "halving_ok": halving}
        ok = ok and errs[list(deltas).index(anchor)] <= 1e-6 and halving
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed <= 30.0
    return CriterionResult(2, "reconstruction", ok, {"deltas": list(deltas), "fixtures": rows,
                                                     "runtime_within_30s": elapsed <= 30.0}, elapsed=elapsed)


def criterion_3(seed=0):
    w = st.build_window(ga.GaussSum.gaussian(math.pi))
    phis = list(probe_functions().values())
    errs, viol = [], []
    for i, f in enumerate(distribution_fixtures()):
        res = st.desingularize(f, phis[i % len(phis)], w)
        errs.append(res.rel_error)
        if res.rel_error > 1e-6:
            viol.append({"inequality": "desingularization", "fixture": i, "rel_error": res.rel_error})
    return CriterionResult(3, "desingularization", not viol, {"rel_errors": errs, "max_rel_error": max(errs)}, viol)


# ---------------------------------------------------------------- 4-6: norms and weights

MODULE_SPACES = ("lp:1:poly:2", "lp:2:poly:2", "lp:4:poly:2", "lp:1:exp:1:1", "lp:2:exp:1:1", "lp:4:exp:1:1")


def criterion_4(seed=0, pairs=100):
    rng = _rng(seed, 4)
    per, viol, reps = {}, [], []
    for spec in MODULE_SPACES:
        E = tmib.parse_space(spec, WIDE_GRID)
        worst, bad = 0.0, 0
        for _ in range(pairs):
            r = tmib.module_conv_check(E, random_gauss(rng), random_gauss(rng))
            reps.append(r)
            worst = max(worst, r.ratio)
            if not r.ok:
                bad += 1
                viol.append(r.violation())
        per[spec] = {"pairs": pairs, "violations": bad, "max_ratio": worst}
    return CriterionResult(4, "Banach-module inequality", not viol, per, viol, _tail_summary(reps))


OMEGA_CASES = {0.5: 8192, 1.0: 128, 2.0: 64}


def criterion_5(seed=0, samples=10_000, t_max=20.0, k_values=(2.0, 3.0, 4.0)):
    rng = _rng(seed, 5)
    per, viol = {}, []
    for s, P in OMEGA_CASES.items():
        M = ws.gevrey(s, P)
        rep = ws.check_omega_inequalities(M, rng.uniform(0.0, t_max, size=(samples, 2)), k_values)
        pts = rng.uniform(0.0, t_max * max(k_values), size=1000)
        scan = ws.associated_function(M, pts)
        brute = ws.associated_function_brute(M, pts)
        diff = float(np.max(np.abs(scan - brute)))
        per[f"gevrey:{s:g}"] = {"P": P, "C0": rep.C0, "H": rep.H, "violations": rep.violations,
                                "max_violation_sum": rep.max_violation_sum,
                                "max_violation_scaling": rep.max_violation_scaling, "scan_vs_brute": diff}
        if rep.violations:
            viol.append({"inequality": "omega-sum", "sequence": M.label, "count": rep.violations,
                         "witness": list(rep.witness_sum)})
        if diff > 1e-12:
            viol.append({"inequality": "omega-scan", "sequence": M.label, "difference": diff})
    return CriterionResult(5, "associated-function inequalities", not viol, per, viol)


def criterion_6(seed=0, pairs=50, grid=WIDE_GRID):
    rng = _rng(seed, 6)
    M, A = ws.gevrey(1.0, 64), ws.gevrey(1.0, 256)
    fs = [(random_gauss(rng), random_gauss(rng)) for _ in range(pairs)]
    per, viol, reps = {}, [], []
    for ell in (0.5, 1.0, 2.0):
        for q in (0.5, 1.0, 2.0):
            params = gn.NormParams(M, A, ell, q, x_grid=grid)
            worst = 0.0
            for phi, psi in fs:
                r = gn.conv_estimate_check(phi, psi, params)
                reps.append(r)
                worst = max(worst, r.ratio)
                if not r.ok:
                    viol.append(r.violation())
            per[f"l={ell:g},q={q:g}"] = {"max_ratio": worst}
    return CriterionResult(6, "Gelfand-Shilov convolution estimate", not viol, per, viol, _tail_summary(reps))


# ---------------------------------------------------------------- 7-8: structure and membership

def structural_fixtures(seed, count=10, ell=1.0):
    rng = _rng(seed, 7)
    M = ws.gevrey(1.0, 64)
    return [random_seqrep_entries(rng, max_support=6, max_order=6, ell=ell, M=M) for _ in range(count)]


def criterion_7(seed=0, ell=1.0, q=1.0):
    M, A = ws.gevrey(1.0, 64), ws.gevrey(1.0, 256)
    E = tmib.TmibSpace.lp(2.0)
    viol, worst_ratio, worst_t = [], 0.0, 0.0
    for entries in structural_fixtures(seed, ell=ell):
        s = cv.SeqRep(entries, E)
        for name, phi in probe_functions().items():
            rep = cv.conv_with_test(s, phi, M, A, ell, q)
            viol.extend(c.violation() for c in rep.violations)
            for row in rep.table:
                a = row["alpha"]
                worst_ratio = max(worst_ratio, row["term_norm"] / row["bound"] if row["bound"] > 0 else 0.0)
                geo = row["normalized"] / 0.55 ** a
                worst_t = max(worst_t, geo)
                if geo > 1.0:
                    viol.append({"inequality": "structural-term", "alpha": a, "phi": name,
                                 "normalized": row["normalized"]})
            if not math.isfinite(tmib.space_norm(E, rep.result)):
                viol.append({"inequality": "structural-term", "phi": name, "reason": "result not in E"})
    m = {"max_term_to_bound": worst_ratio, "max_normalized_over_geometric": worst_t, "pairs": 50}
    return CriterionResult(7, "structural forward bound", not viol, m, viol)


def membership_fixtures():
    """(name, entries, ell) triples; entry sizes follow the Lambda scaling at that ell."""
    g = ga.GaussSum.gaussian(math.pi)
    h = ga.GaussSum.gaussian(0.8, [1.0, 0.3])
    k = ga.translate(ga.GaussSum.gaussian(1.4, [0.5, -0.2j]), 0.3)
    M = ws.gevrey(1.0, 64)

    def sized(f, a, ell):
        return ga.scale(f, math.exp(-(a * math.log(ell) + M.log_values[a])))

    return [
        ("single", {0: g}, 1.0),
        ("second-order", {2: sized(g, 2, 0.5)}, 0.5),
        ("high-order", {8: sized(g, 8, 1.0)}, 1.0),
        ("mixed", {0: h, 1: sized(k, 1, 2.0), 3: sized(g, 3, 2.0)}, 2.0),
        ("wide", {1: sized(ga.GaussSum.gaussian(0.4), 1, 1.0), 4: sized(h, 4, 1.0)}, 1.0),
    ]


def criterion_8(seed=0, fractions=(0.125, 0.25, 0.5, 1.0)):
    M = ws.gevrey(1.0, 64)
    E = tmib.TmibSpace.lp(2.0)
    w = st.build_window(ga.GaussSum.gaussian(math.pi))
    per, viol = {}, []
    for name, entries, ell in membership_fixtures():
        f = cv.synthesize(cv.SeqRep(entries, E))
        qs = [cv.predicted_threshold(ell) * c for c in fractions]
        rep = cv.membership_test(f, w, E, M, qs)
        per[name] = {"ell": ell, "rows": rep.rows}
        for row in rep.rows:
            if not row["stabilized"]:
                viol.append({"inequality": "membership", "fixture": name, "q": row["q"], "ratio": row["ratio"]})
    return CriterionResult(8, "membership detector", not viol, per, viol)


# ---------------------------------------------------------------- 9-10: Riemann scheme, extensions

def criterion_9(seed=0):
    M, A = ws.gevrey(1.0, 64), ws.gevrey(1.0, 256)
    g = ga.GaussSum.gaussian(math.pi)
    conv = ac.convergence_study(g, g, ac.default_schedule(6), M, A, 1.0, 1.0, alpha_max=8)
    dbl = ac.convergence_study(g, g, ac.n_doubling_schedule(), M, A, 1.0, 1.0, alpha_max=8)
    ratios = dbl.ratios
    viol = []
    for tab in (conv, dbl):
        for row in tab.rows:
            if not row["bound_ok"]:
                viol.append({"inequality": "riemann-split", "k": row["k"], "n": row["n"]})
    ok = (not viol and conv.monotone and conv.final_ratio <= 1e-3
          and all(0.3 <= r <= 0.7 for r in ratios))
    m = {"schedule": conv.rows, "final_relative_error": conv.final_ratio, "monotone": conv.monotone,
         "doubling": dbl.rows, "doubling_ratios": ratios}
    return CriterionResult(9, "Riemann scheme", ok, m, viol)


def _kernel_pairs():
    f = ga.GaussSum.gaussian(0.8, [1.0, 0.5])
    h = ga.translate(ga.GaussSum.gaussian(1.3, [1.0, -0.2j]), 0.4)
    return [({a: ga.derivative(f)}, {a + 1: f}) for a in range(3)] + [({0: ga.derivative(h), 2: f},
                                                                       {1: h, 2: f})]


def criterion_10(seed=0):
    M, A = ws.gevrey(1.0, 64), ws.gevrey(1.0, 256)
    E = tmib.TmibSpace.lp(2.0)
    probes_x = np.linspace(-3.0, 3.0, 10)
    phis = list(probe_functions().values())
    tests = phis + [ga.translate(p, 0.7) for p in phis]  # ten pairing probes
    viol = []

    # smooth extension against the structural sum
    identity_gap = 0.0
    rng = _rng(seed, 10)
    for entries in [random_seqrep_entries(rng, 4, 4) for _ in range(3)]:
        s = cv.SeqRep(entries, E)
        for psi in phis[:2]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                a = cv.conv_smooth(s, psi, M, 1.0).result(probes_x)
            b = cv.conv_with_test(s, psi, M, A, 1.0, 1.0).result(probes_x)
            identity_gap = max(identity_gap, float(np.max(np.abs(a - b))))
    if identity_gap != 0.0:
        viol.append({"inequality": "smooth-extension", "identity_gap": identity_gap})

    # kernel invariance
    kernel_gap = 0.0
    psi = phis[0]
    g_side = cv.SeqRep({0: ga.GaussSum.gaussian(1.1), 1: ga.GaussSum.gaussian(2.0, [0.3])}, E)
    for e1, e2 in _kernel_pairs():
        s1, s2 = cv.SeqRep(e1, E), cv.SeqRep(e2, E)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            v1 = cv.conv_smooth(s1, psi, M, 1.0).result(probes_x)
            v2 = cv.conv_smooth(s2, psi, M, 1.0).result(probes_x)
        kernel_gap = max(kernel_gap, float(np.max(np.abs(v1 - v2) / np.maximum(1.0, np.abs(v1)))))
        h1 = cv.synthesize(cv.conv_cauchy(s1, g_side, M, 0.5).result)
        h2 = cv.synthesize(cv.conv_cauchy(s2, g_side, M, 0.5).result)
        for phi in tests:
            p1, p2 = ga.pair(h1, phi), ga.pair(h2, phi)
            kernel_gap = max(kernel_gap, abs(p1 - p2) / max(1.0, abs(p1)))
    if kernel_gap > 1e-8:
        viol.append({"inequality": "kernel-invariance", "gap": kernel_gap})

    # Cauchy products with 3x3 supports: bound and nested pairing
    nested_gap = 0.0
    for entries_f, entries_g in [(random_seqrep_entries(rng, 3, 3), random_seqrep_entries(rng, 3, 3))
                                 for _ in range(3)]:
        fseq = cv.SeqRep(dict(zip((0, 1, 2), entries_f.values())), E)
        gseq = cv.SeqRep(dict(zip((0, 1, 2), entries_g.values())), E)
        rep = cv.conv_cauchy(fseq, gseq, M, 0.5, probes=phis)
        nested_gap = max([nested_gap] + rep.extra["pairing_gaps"])
        viol.extend(c.violation() for c in rep.violations)
    if nested_gap > 1e-8:
        viol.append({"inequality": "cauchy-extension", "nested_gap": nested_gap})
    m = {"identity_gap": identity_gap, "kernel_gap": kernel_gap, "nested_gap": nested_gap}
    return CriterionResult(10, "extension consistency", not viol, m, viol)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_all(seed=0, only=None):
    out = []
    for fn in CRITERIA:
        n = int(fn.__name__.rsplit("_", 1)[1])
        if only and n not in only:
            continue
        t0 = time.perf_counter()
        res = fn(seed)
        res.elapsed = time.perf_counter() - t0
        out.append(res)
    return out

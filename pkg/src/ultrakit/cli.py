"""``ultrakit`` command line.

Every subcommand writes ``<out-dir>/<subcommand>.json`` with the
``ultrakit-report/1`` schema.  Exit codes: 0 clean, 1 inequality violation,
2 bad configuration, 3 tail certificate failure (grid too small).
"""
import csv
import json
import math
import sys
import time
import warnings
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import _kernels
from . import gaussalg as ga
from . import weightseq as ws
from .fixtures import FixtureError, evaluate_claim, gaussian_fixtures, load_fixture, probe_functions
from .grids import FreqGrid, TailCertificateError, XGrid
from .reports import INEQUALITIES, CheckReport, to_plain

SCHEMA = "ultrakit-report/1"
EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_CERT = 0, 1, 2, 3


class Run:
    """Collects results, violations and tail records for one subcommand."""

    def __init__(self, ctx, name, params):
        self.ctx = ctx
        self.name = name
        self.params = params
        self.results = {}
        self.violations = []
        self.tails = []
        self.t0 = time.perf_counter()

    def check(self, rep):
        if isinstance(rep, CheckReport):
            for t in rep.details.get("tails", []):
                self.tail(t)
            if not rep.ok:
                self.violations.append(rep.violation())
            return rep.as_dict()
        return rep

    def violation(self, entry):
        entry = dict(entry)
        entry.setdefault("paper_ref", INEQUALITIES.get(entry.get("inequality"), INEQUALITIES["claim"]))
        self.violations.append(to_plain(entry))

    def tail(self, record):
        rec = record.as_dict() if hasattr(record, "as_dict") else dict(record)
        self.tails.append(to_plain(rec))

    @property
    def cert_failures(self):
        return [t for t in self.tails if not t.get("certified", True)]

    def finish(self):
        obj = self.ctx.obj
        echo = {"subcommand": self.name, "seed": obj["seed"], "threads": obj["threads"],
                "params": to_plain(self.params), "version": __version__}
        if obj["config_path"]:
            echo["config"] = obj["config_path"]
        timings = {"recorded": False}
        if obj["timings"]:
            timings = {"recorded": True, "seconds": time.perf_counter() - self.t0}
        report = {"schema": SCHEMA, "config_echo": echo, "results": to_plain(self.results),
                  "violations": self.violations, "tail_certificates": self.tails, "timings": timings}
        out_dir = Path(obj["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{self.name}.json"
        path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
        click.echo(f"report: {path}")
        if self.cert_failures:
            click.echo(f"{len(self.cert_failures)} tail certificate failure(s); enlarge the grid", err=True)
            self.ctx.exit(EXIT_CERT)
        if self.violations:
            for v in self.violations[:10]:
                click.echo(f"violation: {v.get('inequality')} witness={v.get('witness')}", err=True)
            self.ctx.exit(EXIT_VIOLATION)
        self.ctx.exit(EXIT_OK)


def _run(ctx, name, params, body):
    """Run ``body(run)``; map configuration and certificate errors to exit codes."""
    run = Run(ctx, name, params)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ws.SaturationWarning)
            body(run)
    except TailCertificateError as exc:
        if exc.record is not None:
            run.tail(exc.record)
        else:
            run.tail({"label": str(exc), "certified": False})
        run.results["error"] = str(exc)
    except (FixtureError, ValueError, KeyError, OSError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    run.finish()


def _json_arg(value, what):
    """Inline JSON (starting with '{' or '[') or a path to a JSON file."""
    if value is None:
        return {}
    text = value.strip()
    try:
        if text.startswith(("{", "[")):
            return json.loads(text)
        with open(value) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureError(f"cannot read {what}: {exc}") from exc


def _sequence(spec, P):
    kind, _, rest = spec.partition(":")
    if kind == "gevrey":
        return ws.gevrey(float(rest), P)
    if kind == "file":
        text = Path(rest).read_text()
        try:
            values = json.loads(text)
        except json.JSONDecodeError:
            values = [float(v) for v in text.split()]
        if len(values) < P + 1:
            raise ValueError(f"{rest} holds {len(values)} values; order {P} needs {P + 1}")
        return ws.from_values(values[: P + 1], label=f"file:{Path(rest).name}")
    raise ValueError(f"bad sequence spec {spec!r}")


def _functions(fixture):
    """(functions, claims) from a fixture path, or the built-in set."""
    if fixture is None:
        return gaussian_fixtures(), []
    return load_fixture(fixture)


def _x_grid(R, h):
    return XGrid(float(R), float(h))


def _floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


# ---------------------------------------------------------------- group

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON file with per-subcommand option defaults, e.g. {\"norms\": {\"ell\": 0.5}}.")
@click.option("--out-dir", default="ultrakit-out", show_default=True, help="Directory for reports and CSVs.")
@click.option("--seed", default=0, show_default=True, type=int, help="Seed for randomized sweeps.")
@click.option("--threads", default=None, type=int, help="Thread count for the compiled kernels.")
@click.option("--timings/--no-timings", default=False, help="Record wall-clock timings (breaks byte stability).")
@click.version_option(__version__)
@click.pass_context
def main(ctx, config_path, out_dir, seed, threads, timings):
    """Numerical checks for Gelfand-Shilov test functions, STFTs and structural convolutions."""
    if config_path:
        try:
            with open(config_path) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            click.echo(f"configuration error: {exc}", err=True)
            ctx.exit(EXIT_CONFIG)
        if not isinstance(cfg, dict):
            click.echo("configuration error: config must be a JSON object", err=True)
            ctx.exit(EXIT_CONFIG)
        ctx.default_map = cfg
    if threads:
        _kernels.set_threads(threads)
    ctx.obj = {"out_dir": out_dir, "seed": seed, "threads": threads, "timings": timings,
               "config_path": config_path}


# ---------------------------------------------------------------- weights

@main.command()
@click.option("--sequence", required=True, help="gevrey:<s> or file:<path> (values M_0..M_P).")
@click.option("--order", "P", default=64, show_default=True, type=click.IntRange(min=8))
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the condition report here.")
@click.option("--samples", default=1000, show_default=True, type=click.IntRange(min=1),
              help="Random pairs for the associated-function inequalities.")
@click.pass_context
def weights(ctx, sequence, P, report_path, samples):
    """Conditions, constants and associated-function samples of a weight sequence."""
    def body(run):
        M = _sequence(sequence, P)
        rep = ws.check_conditions(M)
        ts = [2.0 ** k for k in range(-2, 9)]
        data = rep.as_dict()
        data["omega_samples"] = [{"t": t, "value": float(ws.associated_function(M, t, warn=False))} for t in ts]
        run.results["conditions"] = data
        if report_path:
            Path(report_path).write_text(json.dumps(to_plain(data), sort_keys=True, indent=2) + "\n")
        if rep.m2prime.holds and rep.m2prime.H > 1:
            # keep samples inside the range the prefix resolves
            t_max = float(np.exp(M.log_ratios[-3])) / 8.0
            rng = np.random.default_rng(ctx.obj["seed"])
            omega = ws.check_omega_inequalities(M, rng.uniform(0, t_max, size=(samples, 2)), (2.0, 3.0), rep)
            run.results["omega_check"] = {"t_max": t_max, "violations": omega.violations,
                                          "max_violation_sum": omega.max_violation_sum,
                                          "max_violation_scaling": omega.max_violation_scaling}
            if omega.violations:
                run.violation({"inequality": "omega-sum", "count": omega.violations,
                               "witness": list(omega.witness_sum)})
        click.echo(f"{M.label}: m1={rep.m1} m2'={rep.m2prime.holds} (C0={rep.m2prime.C0:g}, H={rep.m2prime.H:g}) "
                   f"m2={rep.m2.holds} m3'={rep.m3prime_diverges}")
    _run(ctx, "weights", {"sequence": sequence, "order": P, "samples": samples}, body)


# ---------------------------------------------------------------- algebra self-check

def _algebra_checks(rng, pairs):
    from scipy.integrate import IntegrationWarning, quad

    from .fixtures import random_gauss

    warnings.simplefilter("ignore", IntegrationWarning)

    def cquad(fn, lo=-np.inf, hi=np.inf):
        re = quad(lambda t: fn(t).real, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        im = quad(lambda t: fn(t).imag, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        return complex(re, im)

    worst = {"convolution": 0.0, "fourier": 0.0, "derivative": 0.0, "integral": 0.0, "text": 0.0}
    bad = []
    for i in range(pairs):
        f = random_gauss(rng, deg_max=4, a_range=(0.3, 3.0))
        g = random_gauss(rng, deg_max=4, a_range=(0.3, 3.0))
        conv = ga.convolve(f, g)
        x0 = float(rng.uniform(-1.5, 1.5))
        ref = cquad(lambda t: complex(g(t)) * complex(f(x0 - t)))
        scale = max(cquad(lambda t: abs(complex(g(t)) * complex(f(x0 - t)))).real, 1e-300)
        err = abs(complex(conv(x0)) - ref) / scale
        worst["convolution"] = max(worst["convolution"], err)
        if err > 1e-8:
            bad.append({"inequality": "algebra-identity", "check": "convolution", "pair": i, "error": err})
        xi = float(rng.uniform(-1.0, 1.0))
        fh = ga.fourier(f)(xi)
        ref = cquad(lambda t: complex(f(t)) * np.exp(-2j * np.pi * t * xi))
        scale = max(cquad(lambda t: abs(complex(f(t)))).real, 1e-300)
        err = abs(complex(fh) - ref) / scale
        worst["fourier"] = max(worst["fourier"], err)
        if err > 1e-8:
            bad.append({"inequality": "algebra-identity", "check": "fourier", "pair": i, "error": err})
        h = 1e-4
        fd = (f(x0 + h) - f(x0 - h)) / (2 * h)
        err = abs(complex(ga.derivative(f)(x0)) - complex(fd)) / max(1.0, abs(complex(fd)))
        worst["derivative"] = max(worst["derivative"], err)
        if err > 1e-6:
            bad.append({"inequality": "algebra-identity", "check": "derivative", "pair": i, "error": err})
        ref = cquad(lambda t: complex(f(t)))
        err = abs(complex(ga.integrate(f)) - ref) / max(1.0, abs(ref))
        worst["integral"] = max(worst["integral"], err)
        if err > 1e-8:
            bad.append({"inequality": "algebra-identity", "check": "integral", "pair": i, "error": err})
        back = ga.from_text(ga.to_text(f))
        xs = np.linspace(-2, 2, 9)
        err = float(np.max(np.abs(back(xs) - f(xs))))
        worst["text"] = max(worst["text"], err)
        if err != 0.0:
            bad.append({"inequality": "algebra-identity", "check": "text", "pair": i, "error": err})
    return worst, bad


@main.command("algebra-selfcheck")
@click.option("--pairs", default=100, show_default=True, type=click.IntRange(min=1))
@click.pass_context
def algebra_selfcheck(ctx, pairs):
    """Closed-form convolution, Fourier transform, derivative and integral against quadrature."""
    def body(run):
        worst, bad = _algebra_checks(np.random.default_rng(ctx.obj["seed"]), pairs)
        run.results = {"pairs": pairs, "max_errors": worst}
        for b in bad:
            run.violation(b)
        click.echo(" ".join(f"{k}={v:.2e}" for k, v in worst.items()))
    _run(ctx, "algebra-selfcheck", {"pairs": pairs}, body)


# ---------------------------------------------------------------- norms

def _norm_params(p, run=None):
    from .gsnorms import NormParams
    M = _sequence(p.get("M", "gevrey:1"), int(p.get("P", 64)))
    A = _sequence(p.get("A", "gevrey:1"), int(p.get("PA", 256)))
    return NormParams(M, A, float(p.get("ell", 1.0)), float(p.get("q", 1.0)), int(p.get("alpha_max", 16)),
                      _x_grid(p.get("R", 12.0), p.get("h", 0.01)))


@main.command()
@click.option("--params", "params_arg", default=None, help="JSON (inline or path): M, A, P, PA, ell, q, alpha_max, R, h.")
@click.option("--fixture", type=click.Path(dir_okay=False), default=None)
@click.option("--out", "out_csv", type=click.Path(dir_okay=False), default=None,
              help="CSV (alpha, x_or_xi, raw, weighted); one file per function, suffixed by name when several.")
@click.pass_context
def norms(ctx, params_arg, fixture, out_csv):
    """Gelfand-Shilov sup and L1 norms with tail certificates, plus the convolution estimate."""
    from .gsnorms import conv_estimate_check, gs_l1_norm, gs_sup_norm, norm_table_rows

    def body(run):
        p = _json_arg(params_arg, "params")
        params = _norm_params(p)
        funcs, claims = _functions(fixture)
        table = {}
        for name, f in funcs.items():
            sup = gs_sup_norm(f, params, detail=True, strict=False)
            l1 = gs_l1_norm(f, params, detail=True, strict=False)
            run.tail(sup.tail)
            run.tail(l1.tail)
            table[name] = {"sup": sup.value, "sup_witness": list(sup.witness), "l1": l1.value}
        run.results["norms"] = table
        names = list(funcs)
        run.results["convolution_estimate"] = [
            dict(run.check(conv_estimate_check(funcs[a], funcs[b], params)), pair=[a, b])
            for a, b in zip(names, names[1:] + names[:1])]
        run.results["claims"] = [run.check(evaluate_claim(c, funcs, params.x_grid)) for c in claims]
        if out_csv:
            for name, f in funcs.items():
                path = Path(out_csv)
                if len(funcs) > 1:
                    path = path.with_name(f"{path.stem}-{name}{path.suffix or '.csv'}")
                with open(path, "w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(["alpha", "x_or_xi", "raw", "weighted"])
                    for row in norm_table_rows(f, params):
                        w.writerow([row[0], repr(row[1]), repr(row[2]), repr(row[3])])
        for name, row in table.items():
            click.echo(f"{name}: sup={row['sup']:.6g} l1={row['l1']:.6g}")
    _run(ctx, "norms", {"params": params_arg, "fixture": fixture}, body)


# ---------------------------------------------------------------- tmib

@main.command("tmib")
@click.option("--space", "space_spec", required=True, help="lp:<p>:<w> | flp:<p>:<w> | c0w:<w>; w = const | poly:k | exp:s:q")
@click.option("--check", "what", type=click.Choice(["axioms", "module", "admissible", "mollifier"]), required=True)
@click.option("--fixture", type=click.Path(dir_okay=False), default=None)
@click.option("--pairs", default=20, show_default=True, type=click.IntRange(min=1))
@click.option("--q-list", default="0.5,1,2,4", show_default=True)
@click.option("--extent", "R", default=12.0, show_default=True, type=float)
@click.option("--step", "h", default=0.01, show_default=True, type=float)
@click.pass_context
def tmib_cmd(ctx, space_spec, what, fixture, pairs, q_list, R, h):
    """Operator weights, axioms, admissibility, module convolution and mollifiers."""
    from . import tmib
    from .fixtures import random_gauss

    def body(run):
        E = tmib.parse_space(space_spec, _x_grid(R, h))
        A = ws.gevrey(1.0, 256)
        qs = _floats(q_list)
        funcs, claims = _functions(fixture) if fixture else ({}, [])
        if what == "axioms":
            rep = tmib.check_tmib_axioms(E, A, A, qs)
            run.results["axioms"] = rep.as_dict()
            click.echo(json.dumps(to_plain(rep.as_dict()["growth_table"])))
        elif what == "module":
            rng = np.random.default_rng(ctx.obj["seed"])
            rows = [run.check(tmib.module_conv_check(E, random_gauss(rng), random_gauss(rng))) for _ in range(pairs)]
            names = list(funcs)
            rows += [run.check(tmib.module_conv_check(E, funcs[a], funcs[b])) for a in names for b in names]
            run.results["module"] = {"checks": len(rows), "max_ratio": max(r["left"] / r["right"] for r in rows)}
            click.echo(f"{len(rows)} module checks, {len(run.violations)} violations")
        elif what == "admissible":
            run.results["admissible"] = [tmib.check_admissible(E.weight, A, q, E.grid).as_dict() for q in qs]
            click.echo(json.dumps(to_plain(run.results["admissible"])))
        else:
            phi = next(iter(funcs.values())) if funcs else ga.GaussSum.gaussian(math.pi)
            rep = tmib.mollifier_study(ga.GaussSum.gaussian(math.pi), phi, E)
            run.results["mollifier"] = rep.as_dict()
            if not rep.final_ok:
                run.violation({"inequality": "mollifier", "witness": {"n": rep.n_list[-1]},
                               "left": rep.errors[-1], "right": 1e-3 * rep.phi_norm})
            click.echo(f"errors: {' '.join(f'{e:.2e}' for e in rep.errors)}")
        run.results["claims"] = [run.check(evaluate_claim(c, funcs, E.grid)) for c in claims]
    _run(ctx, "tmib", {"space": space_spec, "check": what, "fixture": fixture, "pairs": pairs,
                       "q_list": q_list, "extent": R, "step": h}, body)


# ---------------------------------------------------------------- stft

@main.command("stft")
@click.option("--fixture", type=click.Path(dir_okay=False), default=None)
@click.option("--window-seed", default="gauss", show_default=True,
              help="Name of a fixture function, or 'gauss' for exp(-pi x^2).")
@click.option("--xi-extent", default=8.0, show_default=True, type=float)
@click.option("--xi-step", default=0.02, show_default=True, type=float)
@click.option("--check", "what", type=click.Choice(["reconstruct", "desingularize", "decay"]), required=True)
@click.option("--space", "space_spec", default="lp:2:const", show_default=True, help="Space for --check decay.")
@click.option("--q-list", default="0.5,1,2", show_default=True)
@click.option("--out", "out_csv", type=click.Path(dir_okay=False), default=None, help="Decay profile CSV.")
@click.pass_context
def stft_cmd(ctx, fixture, window_seed, xi_extent, xi_step, what, space_spec, q_list, out_csv):
    """STFT reconstruction, desingularization and decay profiles."""
    from . import stft as st
    from . import tmib
    from .fixtures import distribution_fixtures

    def body(run):
        funcs, claims = _functions(fixture)
        if window_seed == "gauss":
            seed_fn = ga.GaussSum.gaussian(math.pi)
        elif window_seed in funcs:
            seed_fn = funcs[window_seed]
        else:
            raise FixtureError(f"unknown window seed {window_seed!r}")
        window = st.build_window(seed_fn)
        grid = FreqGrid(xi_extent, xi_step)
        run.results["window"] = {"lambda": window.lam, "psi_norm_sq": window.l2_norm_sq,
                                 "psi": ga.to_text(window.psi)}
        if what == "reconstruct":
            rows = {}
            for name, f in funcs.items():
                err = st.reconstruct_check(f, window, grid)
                rows[name] = err
                if err > 1e-6:
                    run.violation({"inequality": "reconstruction", "witness": {"function": name},
                                   "left": err, "right": 1e-6})
            run.results["reconstruct"] = rows
        elif what == "desingularize":
            if fixture:
                dists = {f"{name}@{k}": ga.FiniteDistribution({k: f}) for name, f in funcs.items() for k in (0, 1, 2)}
            else:
                dists = {f"builtin{i}": d for i, d in enumerate(distribution_fixtures())}
            phis = list(probe_functions().values())
            rows = {}
            for i, (name, f) in enumerate(dists.items()):
                res = st.desingularize(f, phis[i % len(phis)], window, grid)
                rows[name] = {"value": res.value, "exact": res.exact, "rel_error": res.rel_error}
                if res.rel_error > 1e-6:
                    run.violation({"inequality": "desingularization", "witness": {"fixture": name},
                                   "left": res.rel_error, "right": 1e-6})
            run.results["desingularize"] = rows
        else:
            E = tmib.parse_space(space_spec)
            M = ws.gevrey(1.0, 64)
            qs = _floats(q_list)
            rows = {}
            for name, f in funcs.items():
                prof = st.decay_profile(f, window.psi, E, grid)
                fit = st.fit_decay(prof, M, qs)
                rows[name] = {"fit": fit, "uncertified_tails": prof.meta["uncertified_tails"]}
                if out_csv:
                    path = Path(out_csv)
                    if len(funcs) > 1:
                        path = path.with_name(f"{path.stem}-{name}{path.suffix or '.csv'}")
                    xi = grid.nodes
                    with open(path, "w", newline="") as fh:
                        w = csv.writer(fh)
                        w.writerow(["xi", "norm"] + [f"weighted_norm_q{i + 1}" for i in range(len(qs))])
                        weighted = [np.exp(ws.associated_function(M, q * np.abs(xi), warn=False)) * prof.values
                                    for q in qs]
                        for j in range(xi.size):
                            w.writerow([repr(float(xi[j])), repr(float(prof.values[j]))]
                                       + [repr(float(c[j])) for c in weighted])
            run.results["decay"] = {"space": E.describe(), "q_list": qs, "profiles": rows}
        run.results["claims"] = [run.check(evaluate_claim(c, funcs)) for c in claims]
        click.echo(json.dumps(to_plain({k: v for k, v in run.results.items() if k != "window"}))[:2000])
    _run(ctx, "stft", {"fixture": fixture, "window_seed": window_seed, "xi_extent": xi_extent,
                       "xi_step": xi_step, "check": what, "space": space_spec, "q_list": q_list}, body)


# ---------------------------------------------------------------- convolutor

@main.command("convolutor")
@click.option("--seq", "seq_path", type=click.Path(dir_okay=False), required=True, help="Serialized SeqRep (JSON).")
@click.option("--op", type=click.Choice(["norm", "synthesize", "conv-test", "membership", "conv-smooth",
                                         "conv-cauchy"]), required=True)
@click.option("--params", "params_arg", default=None,
              help="JSON (inline or path): ell, q, M, A, psi (GaussSum text), g_seq (path), q_list.")
@click.pass_context
def convolutor_cmd(ctx, seq_path, op, params_arg):
    """Structural sequences: Lambda norms, synthesis, bounds and extended convolutions."""
    from . import convolutor as cv
    from . import stft as st

    def body(run):
        p = _json_arg(params_arg, "params")
        s = cv.SeqRep.from_json(Path(seq_path).read_text())
        M = _sequence(p.get("M", "gevrey:1"), int(p.get("P", 64)))
        A = _sequence(p.get("A", "gevrey:1"), int(p.get("PA", 256)))
        ell, q = float(p.get("ell", 1.0)), float(p.get("q", 1.0))
        psi = ga.from_text(p["psi"]) if "psi" in p else ga.GaussSum.gaussian(math.pi)
        run.results["space"] = s.space.describe()
        run.results["support"] = list(s.support)
        if op == "norm":
            ells = _floats(p.get("ell_list", f"{ell}"))
            run.results["lambda"] = {f"{e:g}": cv.lambda_norm(s, M, e) for e in ells}
        elif op == "synthesize":
            run.results["distribution"] = {str(a): ga.to_text(g) for a, g in cv.synthesize(s).parts.items()}
        elif op == "conv-test":
            out = {}
            for name, phi in probe_functions().items():
                rep = cv.conv_with_test(s, phi, M, A, ell, q)
                out[name] = rep.as_dict()
                for c in rep.checks:
                    run.check(c)
            run.results["conv_test"] = out
        elif op == "membership":
            window = st.build_window(ga.GaussSum.gaussian(math.pi))
            qs = _floats(p.get("q_list", ",".join(f"{cv.predicted_threshold(ell) * c!r}" for c in (0.25, 0.5, 1.0))))
            rep = cv.membership_test(cv.synthesize(s), window, s.space, M, qs)
            run.results["membership"] = rep.as_dict()
        elif op == "conv-smooth":
            rep = cv.conv_smooth(s, psi, M, ell)
            for c in rep.checks:
                run.check(c)
            run.results["conv_smooth"] = rep.as_dict()
        else:
            g = cv.SeqRep.from_json(Path(p["g_seq"]).read_text()) if "g_seq" in p else s
            rep = cv.conv_cauchy(s, g, M, ell, probes=list(probe_functions().values()))
            for c in rep.checks:
                run.check(c)
            gaps = rep.extra["pairing_gaps"]
            if max(gaps) > 1e-8:
                run.violation({"inequality": "cauchy-extension", "witness": {"pairing_gap": max(gaps)}})
            run.results["conv_cauchy"] = rep.as_dict()
        click.echo(f"{op}: {len(run.violations)} violation(s)")
    _run(ctx, "convolutor", {"seq": seq_path, "op": op, "params": params_arg}, body)


# ---------------------------------------------------------------- riemann

def _schedule(arg):
    from . import approxconv as ac
    if arg in (None, "default"):
        return ac.default_schedule()
    if arg == "doubling":
        return ac.n_doubling_schedule()
    data = _json_arg(arg, "schedule")
    if not isinstance(data, list) or not data:
        raise FixtureError("schedule must be a nonempty list of {m, n, gamma}")
    return [ac.RiemannScheme(float(r["m"]), int(r["n"]), float(r["gamma"])) for r in data]


@main.command("riemann")
@click.option("--fixture", type=click.Path(dir_okay=False), default=None,
              help="First two functions are phi and psi (default: both exp(-pi x^2)).")
@click.option("--schedule", "schedule_arg", default="default", show_default=True,
              help="'default', 'doubling', or JSON list of {m, n, gamma}.")
@click.option("--out", "out_csv", type=click.Path(dir_okay=False), default=None)
@click.option("--alpha-max", default=8, show_default=True, type=click.IntRange(min=0, max=32))
@click.option("--ell", default=1.0, show_default=True, type=float)
@click.option("--q", default=1.0, show_default=True, type=float)
@click.pass_context
def riemann(ctx, fixture, schedule_arg, out_csv, alpha_max, ell, q):
    """Riemann-sum convolution scheme: error split and convergence table."""
    from . import approxconv as ac

    def body(run):
        if fixture:
            funcs, _ = load_fixture(fixture)
            vals = list(funcs.values())
            phi, psi = vals[0], vals[1 if len(vals) > 1 else 0]
        else:
            phi = psi = ga.GaussSum.gaussian(math.pi)
        M, A = ws.gevrey(1.0, 64), ws.gevrey(1.0, 256)
        tab = ac.convergence_study(phi, psi, _schedule(schedule_arg), M, A, ell, q, alpha_max)
        run.results = {"rows": tab.rows, "reference_norm": tab.reference_norm, "monotone": tab.monotone,
                       "final_relative_error": tab.final_ratio, "ratios": tab.ratios}
        for row in tab.rows:
            if not row["bound_ok"]:
                run.violation({"inequality": "riemann-split", "witness": {"k": row["k"]}})
        if out_csv:
            with open(out_csv, "w", newline="") as fh:
                w = csv.writer(fh)
                cols = ["k", "m", "n", "gamma", "S1", "S2", "S3", "total_measured"]
                w.writerow(cols)
                for row in tab.rows:
                    w.writerow([row[c] if c in ("k", "n") else repr(float(row[c])) for c in cols])
        for row in tab.rows:
            click.echo(f"k={row['k']} m={row['m']:g} n={row['n']} total={row['total_measured']:.3e} "
                       f"S1={row['S1']:.2e} S2={row['S2']:.2e} S3={row['S3']:.2e}")
    _run(ctx, "riemann", {"fixture": fixture, "schedule": schedule_arg, "alpha_max": alpha_max,
                          "ell": ell, "q": q}, body)


# ---------------------------------------------------------------- all

@main.command("all")
@click.option("--only", default=None, help="Comma-separated criterion numbers (default: all).")
@click.pass_context
def all_cmd(ctx, only):
    """The acceptance suite; one PASS/FAIL line per criterion."""
    from .acceptance import run_all

    def body(run):
        sel = {int(v) for v in only.split(",")} if only else None
        results = run_all(ctx.obj["seed"], sel)
        for r in results:
            run.results[f"criterion_{r.number:02d}"] = r.as_dict()
            for v in r.violations:
                run.violation(v)
            if r.tails:
                run.tail({"label": f"criterion {r.number}", **r.tails,
                          "certified": r.tails["certified"] == r.tails["checked"]})
            if not r.passed and not r.violations:
                run.violation({"inequality": "claim", "witness": {"criterion": r.number, "name": r.name}})
            click.echo(r.line())
    _run(ctx, "all", {"only": only}, body)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

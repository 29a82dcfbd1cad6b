"""Built-in fixtures, seeded random generators and fixture files.

A fixture file is JSON of the form::

    {"functions": {"name": "<GaussSum text>", ...},
     "claims": [{"check": "norm-bound", "space": "lp:2:const", "f": "name", "bound": 1.0}, ...]}

Claims are asserted inequalities; a false claim is reported as a violation.
"""
import json
import math

import numpy as np

from . import gaussalg as ga


class FixtureError(ValueError):
    pass


def _g(a, coeffs=(1.0,), b=0j, c=0j):
    return ga.GaussSum.gaussian(a, coeffs, b, c)


def gaussian_fixtures():
    """Five Gaussian-class functions used for reconstruction and norm runs."""
    return {
        "gauss": _g(math.pi),
        "wide_poly": _g(0.7, [1.0, 0.3 - 0.2j, 0.5]),
        "shifted": ga.translate(_g(1.5, [1.0, -0.4]), 0.8),
        "modulated": ga.modulate(_g(2.0), 0.6),
        "pair_sum": _g(1.0, [0.5, 0.0, 0.2]) + ga.translate(_g(2.5), -0.5),
    }


def probe_functions():
    """Five test functions for pairings and structural bounds."""
    return {
        "gauss": _g(math.pi),
        "narrow": _g(2.5, [1.0, 0.5]),
        "wide": _g(0.6, [1.0, 0.0, -0.3]),
        "shifted": ga.translate(_g(1.2), 0.5),
        "complex": _g(1.0, [1.0, 0.2j], b=0.3j),
    }


def distribution_fixtures():
    """Ten finite distributions ``sum d^a g_a`` with orders up to 4."""
    g = _g(math.pi)
    h = _g(0.8, [1.0, 0.3])
    k = ga.translate(_g(1.4, [0.5, -0.2j]), 0.3)
    return [
        ga.FiniteDistribution({0: g}),
        ga.FiniteDistribution({1: h}),
        ga.FiniteDistribution({2: g}),
        ga.FiniteDistribution({3: k}),
        ga.FiniteDistribution({4: h}),
        ga.FiniteDistribution({0: h, 1: g}),
        ga.FiniteDistribution({0: k, 2: h, 4: g}),
        ga.FiniteDistribution({1: k, 3: g}),
        ga.FiniteDistribution({2: ga.modulate(g, 0.4), 4: k}),
        ga.FiniteDistribution({0: g, 1: h, 2: k, 3: g, 4: h}),
    ]


def random_gauss(rng, deg_max=3, a_range=(0.3, 3.0), shift=1.0, freq=1.0):
    """A random single-term Gaussian-class function."""
    a = float(rng.uniform(*a_range))
    deg = int(rng.integers(0, deg_max + 1))
    coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    coeffs = coeffs / np.max(np.abs(coeffs))
    x0 = float(rng.uniform(-shift, shift))
    xi = float(rng.uniform(-freq, freq))
    return ga.modulate(ga.translate(ga.GaussSum.gaussian(a, coeffs), x0), xi)


def random_seqrep_entries(rng, max_support=6, max_order=6, ell=1.0, M=None):
    """Random ``{alpha: f_alpha}`` with at most ``max_support`` entries.

    With ``M`` given, each entry is scaled by ``1 / (ell^a M_a)`` so the Lambda
    norm stays of order one.
    """
    size = int(rng.integers(1, max_support + 1))
    orders = sorted(rng.choice(max_order + 1, size=size, replace=False).tolist())
    out = {}
    for a in orders:
        f = random_gauss(rng, deg_max=2, a_range=(0.5, 2.5))
        if M is not None:
            f = ga.scale(f, math.exp(-(a * math.log(ell) + M.log_values[a])))
        out[int(a)] = f
    return out


# ---------------------------------------------------------------- files

def load_fixture(path):
    """Return (functions, claims) from a fixture file; FixtureError on bad input."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureError(f"cannot read fixture {path}: {exc}") from exc
    return parse_fixture(data)


def parse_fixture(data):
    if not isinstance(data, dict) or "functions" not in data:
        raise FixtureError("fixture needs a 'functions' object")
    funcs = data["functions"]
    if not isinstance(funcs, dict) or not funcs:
        raise FixtureError("fixture function list is empty")
    out = {}
    for name, text in funcs.items():
        try:
            out[name] = ga.from_text(text)
        except ValueError as exc:
            raise FixtureError(f"function {name!r}: {exc}") from exc
    claims = data.get("claims", [])
    if not isinstance(claims, list):
        raise FixtureError("'claims' must be a list")
    for c in claims:
        if c.get("check") not in CLAIM_CHECKS:
            raise FixtureError(f"unknown claim check {c.get('check')!r}")
        for key in CLAIM_CHECKS[c["check"]]:
            if key not in c:
                raise FixtureError(f"claim {c['check']!r} misses {key!r}")
            if key in ("f", "g") and c[key] not in out:
                raise FixtureError(f"claim refers to unknown function {c[key]!r}")
    return out, claims


def dump_fixture(functions, claims=()):
    return json.dumps({"functions": {k: ga.to_text(v) for k, v in functions.items()}, "claims": list(claims)},
                      sort_keys=True, indent=2)


CLAIM_CHECKS = {
    "norm-bound": ("space", "f", "bound"),
    "module-convolution": ("space", "f", "g"),
}


def evaluate_claim(claim, functions, grid=None):
    """Evaluate a claim; returns a CheckReport under the 'claim' or module key."""
    from .reports import compare
    from .tmib import DEFAULT_GRID, module_conv_check, parse_space, space_norm

    E = parse_space(claim["space"], grid or DEFAULT_GRID)
    f = functions[claim["f"]]
    if claim["check"] == "norm-bound":
        return compare("claim", space_norm(E, f), float(claim["bound"]),
                       witness={"f": claim["f"], "space": claim["space"]})
    rep = module_conv_check(E, f, functions[claim["g"]])
    if "claimed_left" in claim:  # a stated value for |f*g|_E replaces the computed one
        rep = compare("module-convolution", float(claim["claimed_left"]), rep.right,
                      witness={"f": claim["f"], "g": claim["g"], "space": claim["space"], "claimed": True},
                      details={"computed_left": rep.left})
    return rep

"""Structural sequences ``(f_a)`` and the convolutions built on ``f = sum f_a^(a)``.

Only the forward direction is computable: a finite sequence is synthesized,
convolved and bounded.  Going back from a convolutor to a sequence has no
finite construction, so the STFT decay detector in ``membership_test`` stands
in for it.
"""
import json
import math
import warnings
from dataclasses import dataclass, field


from . import gaussalg as ga
from .grids import FreqGrid
from .gsnorms import NormParams, gs_l1_norm
from .reports import compare, to_plain
from .stft import decay_profile, fit_decay
from .tmib import TmibSpace, de_norm, l1_omega_e, parse_space, space_norm, translation_constant
from .weightseq import SaturationWarning, check_conditions

SCOPE_NOTE = ("forward direction only: sequences are synthesized and bounded; "
              "the converse is probed by the STFT decay detector")

MEMBERSHIP_GRID = FreqGrid(16.0, 0.05)
MEMBERSHIP_INNER = 8.0


@dataclass(frozen=True, eq=False)
class SeqRep:
    """Finite sequence ``alpha -> f_alpha`` of Gaussian-class functions in ``space``."""

    entries: dict
    space: TmibSpace

    def __post_init__(self):
        clean = {}
        for alpha, f in self.entries.items():
            alpha = int(alpha)
            if alpha < 0:
                raise ValueError("orders must be nonnegative")
            f = ga.as_sum(f)
            if not f.is_zero:
                clean[alpha] = f
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @property
    def support(self):
        return tuple(self.entries)

    @property
    def max_order(self):
        return max(self.entries, default=0)

    def with_space(self, space):
        return SeqRep(self.entries, space)

    def to_json(self):
        return json.dumps({"space": self.space.describe(),
                           "entries": {str(a): ga.to_text(f) for a, f in self.entries.items()}},
                          sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text, grid=None, P=256):
        data = json.loads(text)
        space = parse_space(data.get("space", "lp:2:const"), P=P) if grid is None else \
            parse_space(data.get("space", "lp:2:const"), grid, P)
        return cls({int(a): ga.from_text(t) for a, t in data["entries"].items()}, space)


def entry_norms(s):
    return {a: space_norm(s.space, f) for a, f in s.entries.items()}


def _lambda_from_norms(norms, M, ell):
    best = 0.0
    for alpha, n in norms.items():
        if n > 0:
            best = max(best, math.exp(alpha * math.log(ell) + M.log_values[alpha]) * n)
    return best


def lambda_norm(s, M, ell, space=None):
    """``max_alpha ell^alpha M_alpha |f_alpha|_E`` (``space`` overrides E)."""
    if space is not None:
        s = s.with_space(space)
    return _lambda_from_norms(entry_norms(s), M, ell)


def synthesize(s):
    return ga.FiniteDistribution(dict(s.entries))


def _structural_sum(entries, phi):
    total = ga.GaussSum.zero()
    for alpha, f in entries.items():
        total = total + ga.convolve(f, ga.derivative(phi, alpha))
    return total


@dataclass
class BoundReport:
    result: object
    checks: list
    table: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    @property
    def violations(self):
        return [c for c in self.checks if not c.ok]

    def as_dict(self):
        res = self.result
        if isinstance(res, ga.GaussSum):
            res = ga.to_text(res)
        elif isinstance(res, SeqRep):
            res = {str(a): ga.to_text(f) for a, f in res.entries.items()}
        return {"ok": self.ok, "result": res, "checks": [c.as_dict() for c in self.checks],
                "table": to_plain(self.table), "extra": to_plain(self.extra), "scope": SCOPE_NOTE}


def conv_with_test(s, phi, M, A, ell, q, C_Eq=None):
    """``sum_a f_a * phi^(a)`` with the per-term bounds

    ``|f_a * phi^(a)|_E <= C_{E,q} (ell/2)^a M_a |f_a|_E |phi|_{S^{M,ell/2}_{A,1,q}}
    <= C_{E,q} Lambda(ell) |phi| / 2^a``.

    The table carries ``t_a``, the term norm divided by ``C_{E,q} Lambda(ell) |phi|``.
    """
    E = s.space
    phi = ga.as_sum(phi)
    result = _structural_sum(s.entries, phi)
    C = translation_constant(E, A, q) if C_Eq is None else float(C_Eq)
    alpha_max = max(16, s.max_order)
    phi_norm = gs_l1_norm(phi, NormParams(M, A, ell / 2.0, q, alpha_max, E.grid)) if not phi.is_zero else 0.0
    norms = entry_norms(s)
    lam = _lambda_from_norms(norms, M, ell)
    checks, table = [], []
    for alpha, f in s.entries.items():
        left = space_norm(E, ga.convolve(f, ga.derivative(phi, alpha)))
        right = C * math.exp(alpha * math.log(ell / 2.0) + M.log_values[alpha]) * norms[alpha] * phi_norm
        geo = C * lam * phi_norm / 2.0 ** alpha
        checks.append(compare("structural-term", left, right, witness={"alpha": alpha}))
        checks.append(compare("structural-term", right, geo, witness={"alpha": alpha, "stage": "geometric"}))
        denom = C * lam * phi_norm
        table.append({"alpha": alpha, "term_norm": left, "bound": right, "geometric": geo,
                      "normalized": left / denom if denom > 0 else 0.0})
    return BoundReport(result, checks, table, {"C_Eq": C, "phi_norm": phi_norm, "lambda": lam})


def transposition_gap(s, phi, eta):
    """``|pair(S(s), reflect(phi) * eta) - ∫ (sum f_a * phi^(a)) eta|``."""
    lhs = ga.pair(synthesize(s), ga.convolve(ga.reflect(phi), eta))
    rhs = ga.bilinear(_structural_sum(s.entries, ga.as_sum(phi)), eta)
    return abs(lhs - rhs), lhs, rhs


def predicted_threshold(ell):
    """Largest q with ``sup e^{w_M(q xi)} |V_psi f(xi)|_E`` finite for f in ``D^{M,ell}_E``
    when the modulation weight is bounded: ``pi / ell``."""
    return math.pi / ell


@dataclass
class MembershipReport:
    rows: list
    profile: object
    consistent: dict
    scope: str = SCOPE_NOTE

    def as_dict(self):
        return {"rows": to_plain(self.rows), "consistent": {f"{q:g}": v for q, v in self.consistent.items()},
                "uncertified_tails": self.profile.meta.get("uncertified_tails", 0), "scope": self.scope}


def membership_test(f, window, E, M, q_grid, grid=MEMBERSHIP_GRID, inner_extent=MEMBERSHIP_INNER, stability=1.05):
    """STFT decay profile and, per q, whether the weighted sup has settled
    between ``|xi| <= inner_extent`` and the full grid."""
    profile = decay_profile(f, window.psi, E, grid)
    rows = fit_decay(profile, M, q_grid, inner_extent=inner_extent, stability=stability)
    return MembershipReport(rows, profile, {r["q"]: r["stabilized"] for r in rows})


def _unsaturated_de_norm(f, E, M, ell, order):
    """``de_norm`` with the order range doubled until the maximum is interior
    (or the degree cap is reached, in which case the warning is kept)."""
    top = min(ga.DEGREE_CAP, M.P)
    order = min(order, top)
    while True:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SaturationWarning)
            res = de_norm(f, E, M, ell, order, detail=True)
        if res.argmax < order or order == top:
            break
        order = min(2 * order, top)
    if res.argmax == order and res.value > 0:
        warnings.warn(f"D_E norm still maximal at the top order {order}", SaturationWarning, stacklevel=3)
    return res.value


def conv_smooth(s, psi, M, ell, alpha_max=16):
    """``sum_a f_a * psi^(a)`` with ``|.|_{D^{M,ell}_E} <= 2 C0 Lambda(2 ell) |psi|_{D^{M,ell/H}_{L1_{w_E}}}``.

    ``C0, H`` come from (M.2); the bound shifts derivative orders by up to the
    support size, which (M.2)' alone does not control.
    """
    E = s.space
    psi = ga.as_sum(psi)
    m2 = check_conditions(M).m2
    result = _structural_sum(s.entries, psi)
    left = de_norm(result, E, M, ell, alpha_max, detail=True)
    lam = lambda_norm(s, M, 2.0 * ell)
    psi_norm = _unsaturated_de_norm(psi, l1_omega_e(E), M, ell / m2.H, alpha_max + s.max_order)
    right = 2.0 * m2.C0 * lam * psi_norm
    gamma = int(left.argmax)
    check = compare("smooth-extension", left.value, right, witness={"gamma": gamma},
                    details={"C0": m2.C0, "H": m2.H, "lambda_2l": lam, "psi_de_norm": psi_norm})
    table = [{"gamma": g, "de_term": float(v)} for g, v in enumerate(left.per_alpha)]
    return BoundReport(result, [check], table, {"C0": m2.C0, "H": m2.H})


def reflected(s):
    """``{b: (-1)^b reflect(g_b)}`` so that ``synthesize`` commutes with reflection."""
    return SeqRep({b: ga.scale(ga.reflect(g), (-1) ** b) for b, g in s.entries.items()}, s.space)


def conv_pairing(fseq, gseq, phi):
    """``<f * g, phi> := <f, reflect(g) * phi>`` for ``f = S(fseq)``, ``g = S(gseq)``."""
    phi = ga.as_sum(phi)
    if phi.is_zero:
        return 0j
    inner = _structural_sum(reflected(gseq).entries, phi)
    return complex(ga.pair(synthesize(fseq), inner))


def conv_cauchy(fseq, gseq, M, ell, probes=()):
    """Cauchy product ``h_g = sum_{a+b=g} f_a * g_b`` with
    ``|h_g|_E <= C0 Lambda_E(2 ell H) Lambda_{L1_{w_E}}(2 ell H) / (ell^g M_g)``
    and, for each probe, ``pair(S(h), phi)`` against ``conv_pairing``."""
    E = fseq.space
    m2 = check_conditions(M).m2
    h = {}
    for a, f in fseq.entries.items():
        for b, g in gseq.entries.items():
            h[a + b] = h.get(a + b, ga.GaussSum.zero()) + ga.convolve(f, g)
    hseq = SeqRep(h, E)
    big = 2.0 * ell * m2.H
    lam_f = lambda_norm(fseq, M, big)
    lam_g = lambda_norm(gseq, M, big, space=l1_omega_e(E))
    checks, table = [], []
    for gam, hg in hseq.entries.items():
        left = space_norm(E, hg)
        right = m2.C0 * lam_f * lam_g * math.exp(-(gam * math.log(ell) + M.log_values[gam]))
        checks.append(compare("cauchy-extension", left, right, witness={"gamma": gam}))
        table.append({"gamma": gam, "norm": left, "bound": right})
    gaps = []
    for phi in probes:
        direct = complex(ga.pair(synthesize(hseq), phi))
        nested = conv_pairing(fseq, gseq, phi)
        gaps.append(abs(direct - nested) / max(1.0, abs(nested)))
    return BoundReport(hseq, checks, table, {"C0": m2.C0, "H": m2.H, "lambda_f": lam_f, "lambda_g": lam_g,
                                             "pairing_gaps": gaps})

"""Plain records shared by the checkers and the CLI."""
import math
from dataclasses import dataclass, field

import numpy as np

SLACK = 1.0 + 1e-6

# Stable identifiers for every inequality the toolkit checks.  The CLI puts
# them in the ``paper_ref`` field of each violation entry.
INEQUALITIES = {
    "omega-sum": "associated function: w(x+y) <= w(2x) + w(2y)",
    "omega-scaling": "associated function: w(t) - w(kt) <= -log(t/C0) log k / log H",
    "gs-convolution": "Gelfand-Shilov convolution: |phi*psi|_{q/2} <= |phi|_q |psi|_{L1 exp(w_A(q.))}",
    "module-convolution": "Banach module: |f*g|_E <= |f|_E |g|_{L1_{w_E}}",
    "e-to-de": "smoothing: |f*psi|_{D_E} <= C_{E,q} |f|_E |psi|_{S^{M,l}_{A,1,q}}",
    "structural-term": "structural term: |f_a * phi^(a)|_E <= C_{E,q} (l/2)^a M_a |f_a|_E |phi|_{S^{M,l/2}_{A,1,q}}",
    "smooth-extension": "smooth extension: |d^g sum f_a*psi^(a)|_E <= 2 C0 l^g M_g |f|_{Lambda_{2l}} |psi|_{D^{l/H}}",
    "cauchy-extension": "Cauchy product: |h_g|_E <= C0 |f|_{Lambda_{2lH}} |g|_{Lambda_{2lH}(L1)} / (l^g M_g)",
    "riemann-split": "Riemann scheme: |d^a(phi*psi - L)| <= S1 + S2 + S3",
    "reconstruction": "STFT reconstruction: V*_psi V_psi = (psi, psi) id",
    "desingularization": "desingularization: <f, phi> = (gamma,psi)^-1 int <V_psi f(xi), V_gamma' phi(-xi)> dxi",
    "membership": "STFT decay: sup_xi e^{w_M(q xi)} |V_psi f(xi)|_E settles on the frequency grid",
    "kernel-invariance": "equal synthesized sequences give equal extended convolutions",
    "omega-scan": "associated function: ratio scan equals the brute-force supremum",
    "algebra-identity": "closed-form Gaussian algebra agrees with quadrature",
    "mollifier": "approximate identity: |phi*psi_n - phi|_E <= 1e-3 |phi|_E at the last n",
    "claim": "fixture claim",
}


def _float(v):
    v = float(v)
    return v if math.isfinite(v) else repr(v)


def _plain(v):
    if isinstance(v, (float, np.floating)):
        return _float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, complex):
        return {"re": _float(v.real), "im": _float(v.imag)}
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    if isinstance(v, list):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    return v


@dataclass
class CheckReport:
    """Outcome of one ``left <= right * slack`` comparison."""

    inequality: str
    left: float
    right: float
    ok: bool
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def ratio(self):
        if self.right == 0:
            return 0.0 if self.left == 0 else float("inf")
        return self.left / self.right

    def as_dict(self):
        return {"inequality": self.inequality, "left": _float(self.left), "right": _float(self.right),
                "ok": bool(self.ok), "witness": _plain(self.witness), "details": _plain(self.details)}

    def violation(self):
        return {"inequality": self.inequality, "paper_ref": INEQUALITIES[self.inequality],
                "left": _float(self.left), "right": _float(self.right), "witness": _plain(self.witness)}


def compare(inequality, left, right, witness=None, details=None, slack=SLACK):
    left, right = float(left), float(right)
    ok = left <= right * slack
    return CheckReport(inequality, left, right, bool(ok), dict(witness or {}), dict(details or {}))


to_plain = _plain

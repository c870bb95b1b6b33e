"""Solvability and hypoellipticity verdicts for D_t + c(t)P.

The decision procedure splits on whether b = Im c changes sign.  Without a
sign change, solvability is the Diophantine condition on c0 that ignores
exact resonances.  With a sign change, b0 must vanish, only finitely many
modes may be non-resonant, and every superlevel set of int_0^t b must be
connected.  Asymptotic statements are judged at a finite scale J and the
evidence is returned with the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diophantine import DEFAULT_J, condition_A_scan, condition_B_scan, zset
from .torus import SignProfile, connectedness_scan, sign_profile

DEFAULT_TOL = 1e-9


@dataclass
class HypoellipticityVerdict:
    decision: str  # Holds, Fails, Inconclusive
    reason: str
    scan: object = None

    @property
    def holds(self):
        return self.decision == "Holds"


@dataclass
class SolvabilityVerdict:
    branch: str  # "a" (no sign change) or "b" (sign change)
    decision: str  # SolvableAtScale, NotSolvable, Inconclusive
    reason: str
    sign_profile: SignProfile
    b0: float
    scan: object = None
    resonance: object = None
    connectedness: object = None
    witness: dict = field(default_factory=dict)
    hypoellipticity: HypoellipticityVerdict | None = None

    @property
    def solvable(self):
        return self.decision == "SolvableAtScale"


def _mean(c, c0):
    return c.c0 if c0 is None else c0


def classify(c, sys, mu=0.5, J=DEFAULT_J, tol=DEFAULT_TOL, c0=None, hypo=True):
    """Solvability verdict with supporting evidence.

    ``c0`` overrides the mean of c (pass a Fraction or mpmath number for
    exact resonance arithmetic).
    """
    mean = _mean(c, c0)
    prof = sign_profile(c.b, tol)
    b0 = c.b0
    if prof != SignProfile.CHANGES_SIGN:
        scan = condition_A_scan(sys, mean, mu, sys.n, J)
        if scan.verdict == "Satisfied":
            v = SolvabilityVerdict("a", "SolvableAtScale",
                                   "b keeps one sign and c0 passes the Diophantine trend test",
                                   prof, b0, scan)
        elif scan.verdict == "Violated":
            v = SolvabilityVerdict("a", "NotSolvable",
                                   "b keeps one sign and c0 fails the Diophantine trend test",
                                   prof, b0, scan, witness={"modes": scan.witnesses[:32]})
        else:
            v = SolvabilityVerdict("a", "Inconclusive",
                                   f"Diophantine trend ratio {scan.ratio:.3f} is borderline",
                                   prof, b0, scan)
    else:
        v = _classify_sign_change(c, sys, mean, J, tol, prof)
    if hypo:
        v.hypoellipticity = classify_hypoellipticity(c, sys, mu, J, tol, c0)
    return v


def _classify_sign_change(c, sys, mean, J, tol, prof):
    b0 = c.b0
    if abs(b0) > tol:
        return SolvabilityVerdict("b", "NotSolvable", "b changes sign and has nonzero mean",
                                  prof, b0, witness={"b0": b0})
    zs = zset(sys, mean, J)
    comp = zs.complement()
    comp_cls = zs.complement_classification()
    if comp_cls == "InfiniteAtScale":
        tail = comp[comp >= J // 2]
        return SolvabilityVerdict("b", "NotSolvable",
                                  "b changes sign and infinitely many modes are non-resonant",
                                  prof, b0, resonance=zs,
                                  witness={"nonresonant_modes": [int(j) for j in tail[:32]]})
    conn = connectedness_scan(c.B_closed())
    if not conn.connected:
        return SolvabilityVerdict("b", "NotSolvable",
                                  "b changes sign and a superlevel set of its primitive is disconnected",
                                  prof, b0, resonance=zs, connectedness=conn,
                                  witness={"r": conn.r_witness, "components": conn.components})
    return SolvabilityVerdict("b", "SolvableAtScale",
                              "b changes sign with zero mean, finitely many non-resonant modes "
                              "and connected superlevel sets",
                              prof, b0, resonance=zs, connectedness=conn)


def classify_hypoellipticity(c, sys, mu=0.5, J=DEFAULT_J, tol=DEFAULT_TOL, c0=None):
    """Global hypoellipticity verdict.

    Holds when b is not identically zero and keeps one sign; when b is zero
    it holds exactly when the mean passes the Diophantine test that also
    forbids resonances.
    """
    prof = sign_profile(c.b, tol)
    if prof == SignProfile.CHANGES_SIGN:
        return HypoellipticityVerdict("Fails", "b changes sign")
    if prof != SignProfile.ZERO:
        return HypoellipticityVerdict("Holds", "b is not identically zero and keeps one sign")
    scan = condition_B_scan(sys, _mean(c, c0), mu, sys.n, J)
    if scan.verdict == "Satisfied":
        return HypoellipticityVerdict("Holds", "b vanishes and a0 passes the resonance-free Diophantine test", scan)
    if scan.verdict == "Violated":
        return HypoellipticityVerdict("Fails", "b vanishes and a0 is resonant or Liouville-like at scale", scan)
    return HypoellipticityVerdict("Inconclusive", f"trend ratio {scan.ratio:.3f} is borderline", scan)

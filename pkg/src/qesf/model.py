"""Model definitions and the solvability classifier.

A model is fixed by two polynomials: Q (degree <= 2) giving the squared
coordinate velocity z'^2 = Q(z), and P (degree <= 3) giving W0' z' = P(z),
plus up to two boundary singularities (location a_j, exponent mu_j) that
multiply the ground state by |z - a_j|^mu_j, and the polynomial order N of
the excited-state factor.

Solvability is decided purely by the degrees (m, n) and the q0-coupling of
the singularities:
    max{m, n-1} <= 1  -> exactly solvable (all levels algebraic)
    max{m, n-1} == 2  -> type-1 QES (one potential, N+1 algebraic levels)
    m == 3            -> type-2 QES (N+1 potentials sharing one level)
A singularity at a point where Q does not vanish couples the roots into the
potential and promotes an otherwise-ES model to a QES one.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import ModelError
from .poly import Poly

EXACTLY_SOLVABLE = "exactly-solvable"
QES_TYPE1 = "qes-type1"
QES_TYPE2 = "qes-type2"
QES_HIGHER = "qes-higher-type"
QES_SINGULAR = "qes-singularity-induced"

_SING_MIN_GAP = 1e-12


@dataclass(frozen=True)
class Singularity:
    """One boundary singularity: ground-state factor |z - location|^exponent."""

    location: float
    exponent: float


@dataclass(frozen=True)
class ModelSpec:
    """Complete definition of one model."""

    Q: Poly
    P: Poly
    singularities: tuple[Singularity, ...] = ()
    N: int = 0
    branch_sign: int = 1


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" | "warning" | "info"
    message: str


@dataclass(frozen=True)
class SolvabilityClass:
    tag: str
    rationale: str


def spec_seed(spec: ModelSpec) -> int:
    """Deterministic 63-bit seed derived from the model definition.

    Uses sha256 of a canonical text form, so it is stable across runs and
    platforms (unlike Python's salted hash()).
    """
    text = "|".join([
        repr(spec.Q.coeffs),
        repr(spec.P.coeffs),
        repr(tuple((s.location, s.exponent) for s in spec.singularities)),
        repr(spec.N),
        repr(spec.branch_sign),
    ])
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def validate(spec: ModelSpec) -> list[Diagnostic]:
    """Structural checks plus advisory normalizability screening.

    Structural violations come back at level "error". Sign conditions known
    for the catalog families are advisory ("warning"); when the shape is not
    recognized a deferred flag ("info") points at the numerical check in the
    verify module. An empty list means clean.
    """
    out: list[Diagnostic] = []

    if spec.Q.is_zero():
        out.append(Diagnostic("error", "Q must not be identically zero"))
    if spec.Q.degree > 2:
        out.append(Diagnostic("error", f"deg Q = {spec.Q.degree} exceeds 2"))
    if spec.P.degree > 3:
        out.append(Diagnostic("error", f"deg P = {spec.P.degree} exceeds 3"))
    if len(spec.singularities) > 2:
        out.append(Diagnostic("error", "at most two singularities supported"))
    if not isinstance(spec.N, int) or spec.N < 0:
        out.append(Diagnostic("error", f"N must be an integer >= 0 (got {spec.N!r})"))
    if spec.branch_sign not in (1, -1):
        out.append(Diagnostic("error", f"branch_sign must be +1 or -1 (got {spec.branch_sign!r})"))
    sings = spec.singularities
    for i in range(len(sings)):
        for j in range(i + 1, len(sings)):
            if abs(sings[i].location - sings[j].location) <= _SING_MIN_GAP:
                out.append(Diagnostic(
                    "error",
                    f"singularity locations coincide: a={sings[i].location}"))
    if any(d.level == "error" for d in out):
        return out

    # Advisory normalizability screening for recognized shapes.
    q0 = spec.Q.coeff(0)
    q1 = spec.Q.coeff(1)
    q2 = spec.Q.coeff(2)
    m = spec.P.degree
    lead = spec.P.coeffs[-1]
    recognized = False
    if q2 == 0.0 and q1 == 0.0:
        # Linear coordinate z ~ x: ground state exp(-lead*x^(m+1)/...)
        if m >= 1:
            recognized = True
            if lead < 0:
                out.append(Diagnostic(
                    "warning",
                    "phi0 not square-integrable: leading coefficient of P "
                    "must be positive for a linear coordinate"))
    elif q2 == 0.0 and q1 != 0.0:
        # Parabolic coordinate: image is a half-line in the sign of q1.
        if m >= 1:
            recognized = True
            if lead * q1 < 0:
                out.append(Diagnostic(
                    "warning",
                    "phi0 not square-integrable: leading coefficient of P "
                    "must carry the sign of q1 for a parabolic coordinate"))
    elif q2 > 0.0 and q1 == 0.0 and q0 == 0.0:
        # Pure exponential coordinate (Morse family).
        recognized = True
        if m == 2 and spec.P.coeff(2) < 0:
            out.append(Diagnostic(
                "warning", "phi0 not square-integrable: quadratic P coefficient "
                "must be positive for an exponential coordinate"))
        if m <= 1 and lead <= 0:
            out.append(Diagnostic(
                "warning", "no normalizable ground state: linear P coefficient "
                "must be positive for an exponential coordinate"))
    for s in sings:
        if s.exponent < 0 and s.exponent != -float(spec.N):
            out.append(Diagnostic(
                "warning",
                f"negative singularity exponent mu={s.exponent}: only the "
                f"mu = -N case is a documented construction"))
    if not recognized:
        out.append(Diagnostic(
            "info",
            "normalizability not decided structurally; resolve numerically "
            "with verify.normalizability_check"))
    return out


def classify(spec: ModelSpec) -> SolvabilityClass:
    """Solvability class from the polynomial degrees and pole couplings."""
    diags = validate(spec)
    errors = [d.message for d in diags if d.level == "error"]
    if errors:
        raise ModelError("invalid model: " + "; ".join(errors))

    m = spec.P.degree
    n = spec.Q.degree
    top = max(m, n - 1)
    promoted = [
        s for s in spec.singularities
        if s.exponent != 0.0 and abs(spec.Q(s.location)) > 1e-12
    ]
    if top <= 1:
        if promoted:
            locs = ", ".join(f"a={s.location:g}" for s in promoted)
            return SolvabilityClass(
                QES_SINGULAR,
                f"max{{m, n-1}} = {top} <= 1 but Q(a) != 0 at {locs}: the "
                f"singularity couples the roots into the potential")
        return SolvabilityClass(
            EXACTLY_SOLVABLE,
            f"max{{m, n-1}} = max{{{m}, {n - 1}}} = {top} <= 1: roots enter "
            f"only through an additive constant")
    if top == 2:
        return SolvabilityClass(
            QES_TYPE1,
            f"max{{m, n-1}} = max{{{m}, {n - 1}}} = 2: N enters the linear "
            f"term of the potential, roots only additively")
    if m == 3:
        return SolvabilityClass(
            QES_TYPE2,
            "m = 3: roots enter the linear term, yielding N+1 distinct "
            "potentials sharing one level")
    return SolvabilityClass(  # pragma: no cover - unreachable with m<=3, n<=2
        QES_HIGHER, f"degrees (m={m}, n={n}) beyond the type-2 pattern")

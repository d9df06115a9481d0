"""Residuals of the defining equations and their zero decisions.

Checks:

  cdybe        Alt_s(dr) + [r12,r13] + [r12,r23] + [r13,r23]
  unitarity    r + T_s(r) - eps * Omega          (decided exactly)
  zero-weight  [x (x) 1 + 1 (x) x, r] per Cartan basis vector x (exact)
  mdybe        Alt_s(ds) + [[s,s]] + (eps^2/4) [[Omega,Omega]]
  lemma        cdybe(r) and mdybe(r - (eps/2) Omega) agree, and the six-term
               s/Omega cross bracket vanishes exactly
  limits       the X = Delta coth family degenerates onto the two constant
               solutions along a dominant ray as t -> +-infinity

Zero decision policy: coefficients are first tested symbolically (coth atoms
as independent indeterminates; exact and sound).  Coefficients that survive,
which are exactly the ones whose cancellation needs the coth addition law,
are sampled at seeded margin-respecting lattice points and compared against
the tolerance; this outcome is labeled numeric-zero, never exact.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .rmatrix import RMatrixSpec, functional_equation_residual, ode_residual, validate
from .scalars import sample_points
from .superalgebra import LieSuperalgebra, RootDatum
from .tensor import (
    Tensor2,
    Tensor3,
    ad_action,
    alt_s,
    cross_bracket,
    super_twist,
    yb_bracket,
)

Q = Fraction


class PreconditionError(ValueError):
    """A check was invoked on input that violates its stated precondition."""


@dataclass
class VerifyConfig:
    """Numeric policy for residual decisions.

    tolerance defaults to 1e-12 below 128 mantissa bits and 1e-25 at or above;
    the seed fixes every lattice draw, so reports are reproducible.
    """

    precision: int = 128
    tolerance: float | None = None
    points: int = 20
    seed: int = 0
    margin: float = 1e-6
    lattice: int = 10

    @property
    def tol(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return 1e-25 if self.precision >= 128 else 1e-12

    def as_dict(self) -> dict:
        return {
            "precision_bits": self.precision,
            "tolerance": self.tol,
            "points": self.points,
            "seed": self.seed,
            "margin": self.margin,
            "lattice": self.lattice,
        }


@dataclass
class ResidualReport:
    """Outcome of one residual check.

    status 'exact-zero' is a symbolic proof; 'numeric-zero' means every
    sampled value stayed below the tolerance (max_abs records the worst);
    'nonzero' carries a witness {indices, point, value} or a symbolic witness.
    """

    name: str
    status: str
    max_abs: float | None = None
    tolerance: float | None = None
    points_used: int = 0
    witness: dict | None = None
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def is_zero(self) -> bool:
        return self.status in ("exact-zero", "numeric-zero")

    def as_dict(self) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "max_abs": self.max_abs,
            "tolerance": self.tolerance,
            "points_used": self.points_used,
            "witness": self.witness,
            "seconds": round(self.seconds, 6),
        }
        if self.details:
            out["details"] = self.details
        return out


def decide_tensor_zero(t: Tensor2 | Tensor3, name: str, cfg: VerifyConfig) -> ResidualReport:
    """Symbolic-first zero decision for every coefficient of a tensor."""
    start = time.monotonic()
    suspicious = {k: c for k, c in t.coeffs.items() if not c.symbolically_zero()}
    if not suspicious:
        return ResidualReport(name=name, status="exact-zero", seconds=time.monotonic() - start)
    nvars = t.g.rank
    forms = t.singular_forms()
    pts = sample_points(
        nvars, cfg.points, seed=cfg.seed, avoid=forms, margin=cfg.margin, lattice=cfg.lattice
    )
    max_abs = 0.0
    witness = None
    for pt in pts:
        for key, coeff in suspicious.items():
            v = coeff.eval_numeric(pt, precision=cfg.precision, margin=cfg.margin)
            a = abs(v)
            if a > max_abs:
                max_abs = float(a)
                witness = {"indices": list(key), "point": list(pt), "value": float(v)}
    elapsed = time.monotonic() - start
    if max_abs < cfg.tol:
        return ResidualReport(
            name=name,
            status="numeric-zero",
            max_abs=max_abs,
            tolerance=cfg.tol,
            points_used=len(pts),
            seconds=elapsed,
        )
    return ResidualReport(
        name=name,
        status="nonzero",
        max_abs=max_abs,
        tolerance=cfg.tol,
        points_used=len(pts),
        witness=witness,
        seconds=elapsed,
    )


def _decide_exact(t: Tensor2 | Tensor3, name: str, start: float) -> ResidualReport:
    if t.is_zero():
        return ResidualReport(name=name, status="exact-zero", seconds=time.monotonic() - start)
    key = min(t.coeffs)
    from .scalars import to_sexpr

    return ResidualReport(
        name=name,
        status="nonzero",
        witness={"indices": list(key), "coefficient": to_sexpr(t.coeffs[key])},
        seconds=time.monotonic() - start,
    )


# ---------------------------------------------------------------------------
# the residuals


def differential_dr(r: Tensor2) -> Tensor3:
    """dr = sum_i x_i (x) dr/dx_i, first leg in the Cartan."""
    g = r.g
    out: dict = {}
    for coord, c_idx in enumerate(g.cartan):
        for (a, b), coeff in r.coeffs.items():
            d = coeff.differentiate(coord)
            if d.symbolically_zero():
                continue
            key = (c_idx, a, b)
            if key in out:
                out[key] = out[key] + d
            else:
                out[key] = d
    return Tensor3(g, out, _prune=True)


def cdybe_lhs(r: Tensor2) -> Tensor3:
    return alt_s(differential_dr(r)) + yb_bracket(r)


def cdybe_residual(r: Tensor2, cfg: VerifyConfig | None = None) -> tuple[Tensor3, ResidualReport]:
    cfg = cfg or VerifyConfig()
    lhs = cdybe_lhs(r)
    return lhs, decide_tensor_zero(lhs, "cdybe", cfg)


def unitarity_residual(r: Tensor2, eps, omega: Tensor2) -> tuple[Tensor2, ResidualReport]:
    start = time.monotonic()
    res = r + super_twist(r) - omega.scale(Q(eps))
    return res, _decide_exact(res, "unitarity", start)


def zero_weight_residual(r: Tensor2 | Tensor3) -> ResidualReport:
    start = time.monotonic()
    g = r.g
    for c in g.cartan:
        res = ad_action({c: Q(1)}, r)
        if not res.is_zero():
            key = min(res.coeffs)
            from .scalars import to_sexpr

            return ResidualReport(
                name="zero-weight",
                status="nonzero",
                witness={
                    "cartan_vector": g.basis_names[c],
                    "indices": list(key),
                    "coefficient": to_sexpr(res.coeffs[key]),
                },
                seconds=time.monotonic() - start,
            )
    return ResidualReport(name="zero-weight", status="exact-zero", seconds=time.monotonic() - start)


def mdybe_lhs(s: Tensor2, eps, omega: Tensor2) -> Tensor3:
    eps = Q(eps)
    return alt_s(differential_dr(s)) + yb_bracket(s) + yb_bracket(omega).scale(eps * eps / 4)


def mdybe_residual(s: Tensor2, eps, omega: Tensor2, cfg: VerifyConfig | None = None) -> tuple[Tensor3, ResidualReport]:
    cfg = cfg or VerifyConfig()
    lhs = mdybe_lhs(s, eps, omega)
    return lhs, decide_tensor_zero(lhs, "mdybe", cfg)


def lemma_consistency_check(r: Tensor2, eps, omega: Tensor2, cfg: VerifyConfig | None = None) -> ResidualReport:
    """Both sides of the equivalence must agree, and the six-term cross
    bracket of the shifted tensor with the Casimir must vanish exactly."""
    cfg = cfg or VerifyConfig()
    start = time.monotonic()
    _, unit = unitarity_residual(r, eps, omega)
    if not unit.is_zero:
        raise PreconditionError("lemma check requires generalized unitarity")
    s = r - omega.scale(Q(eps) / 2)
    _, cd = cdybe_residual(r, cfg)
    _, md = mdybe_residual(s, eps, omega, cfg)
    cross = cross_bracket(s, omega)
    cross_rep = _decide_exact(cross, "lemma-cross-bracket", time.monotonic())
    consistent = cd.is_zero == md.is_zero
    ok = consistent and cross_rep.status == "exact-zero"
    status = "exact-zero" if ok and cd.status == "exact-zero" and md.status == "exact-zero" else (
        "numeric-zero" if ok else "nonzero"
    )
    return ResidualReport(
        name="lemma",
        status=status,
        seconds=time.monotonic() - start,
        max_abs=max(cd.max_abs or 0.0, md.max_abs or 0.0) if (cd.max_abs or md.max_abs) else None,
        tolerance=cfg.tol,
        witness=None if ok else {"cdybe": cd.as_dict(), "mdybe": md.as_dict(), "cross": cross_rep.as_dict()},
        details={
            "cdybe_status": cd.status,
            "mdybe_status": md.status,
            "cross_bracket_status": cross_rep.status,
            "consistent": consistent,
        },
    )


# ---------------------------------------------------------------------------
# coefficient-identity checks (ODE, functional equation)


def ode_check(spec: RMatrixSpec, rd: RootDatum, cfg: VerifyConfig | None = None) -> ResidualReport:
    """d(phi_a) + A_a (phi_a^2 - eps^2/4) d(h_a) = 0 for every root, exactly."""
    start = time.monotonic()
    indices = range(len(rd)) if spec.epsilon != 0 else sorted(spec.X)
    for i in indices:
        for j, res in enumerate(ode_residual(i, spec, rd)):
            if not res.symbolically_zero():
                from .scalars import to_sexpr

                return ResidualReport(
                    name="phi-ode",
                    status="nonzero",
                    witness={
                        "root": [str(c) for c in rd.roots[i].functional],
                        "coordinate": j,
                        "residual": to_sexpr(res),
                    },
                    seconds=time.monotonic() - start,
                )
    return ResidualReport(name="phi-ode", status="exact-zero", seconds=time.monotonic() - start)


def functional_equation_check(
    spec: RMatrixSpec, rd: RootDatum, cfg: VerifyConfig | None = None
) -> ResidualReport:
    """The pairwise phi relation over every root pair with a + b a root.

    Exact where the residual cancels symbolically (always for eps = 0);
    numeric sampling otherwise.
    """
    from .scalars import zero_status

    cfg = cfg or VerifyConfig()
    start = time.monotonic()
    max_abs = 0.0
    points_used = 0
    any_numeric = False
    for i in range(len(rd)):
        for j in range(len(rd)):
            res = functional_equation_residual(i, j, spec, rd)
            if res is None or res.symbolically_zero():
                continue
            status = zero_status(
                res,
                tol=cfg.tol,
                points=cfg.points,
                precision=cfg.precision,
                margin=cfg.margin,
                seed=cfg.seed,
                lattice=cfg.lattice,
            )
            if status.kind == "nonzero":
                return ResidualReport(
                    name="functional-equation",
                    status="nonzero",
                    max_abs=status.max_abs,
                    tolerance=cfg.tol,
                    points_used=status.points_used,
                    witness={
                        "alpha": [str(c) for c in rd.roots[i].functional],
                        "beta": [str(c) for c in rd.roots[j].functional],
                        "point": list(status.witness_point or ()),
                        "value": status.witness_value,
                    },
                    seconds=time.monotonic() - start,
                )
            any_numeric = True
            max_abs = max(max_abs, status.max_abs or 0.0)
            points_used = max(points_used, status.points_used)
    return ResidualReport(
        name="functional-equation",
        status="numeric-zero" if any_numeric else "exact-zero",
        max_abs=max_abs if any_numeric else None,
        tolerance=cfg.tol if any_numeric else None,
        points_used=points_used,
        seconds=time.monotonic() - start,
    )


# ---------------------------------------------------------------------------
# limit degeneration


def dominant_vector(rd: RootDatum, radius: int = 6) -> tuple[int, ...]:
    """A lattice point with (a, v) >= 1 for every positive root a."""
    n = rd.g.rank
    pos = [rd.coroot_coords(i) for i in rd.positive_indices()]
    for v in itertools.product(range(-radius, radius + 1), repeat=n):
        if all(sum(c * x for c, x in zip(coeffs, v)) >= 1 for coeffs in pos):
            return v
    raise ValueError("no strictly dominant lattice vector within search radius")


def limit_behavior_check(
    spec: RMatrixSpec,
    g: LieSuperalgebra,
    rd: RootDatum,
    cfg: VerifyConfig | None = None,
    *,
    scales: tuple = (10, 20, 40),
    final_tol: float = 1e-15,
) -> ResidualReport:
    """Coefficient-wise limits of the X = Delta family along a dominant ray.

    r(t v) must approach the twisted constant solution as t -> +infinity and
    the untwisted one as t -> -infinity, with geometrically shrinking error.
    The scales are measured in units of 1/eps, so the decay regime matched by
    final_tol is the same for every coupling constant.
    """
    from .rmatrix import constant_example, construct

    cfg = cfg or VerifyConfig()
    start = time.monotonic()
    if spec.epsilon == 0:
        raise PreconditionError("limit check needs a nonzero coupling")
    if spec.X != frozenset(range(len(rd))):
        raise PreconditionError("limit check needs X = all roots")
    if any(v != 0 for v in spec.nu) or not spec.D.is_zero():
        raise PreconditionError("limit check needs nu = 0 and D = 0")
    scales = tuple(Q(t) / abs(spec.epsilon) for t in scales)

    r = construct(spec, g, rd)
    v = dominant_vector(rd)
    targets = {
        1: constant_example(g, rd, spec.epsilon, which="Tsr"),
        -1: constant_example(g, rd, spec.epsilon, which="r"),
    }
    devs: dict[int, list[float]] = {1: [], -1: []}
    for direction in (1, -1):
        target_vals = {
            k: c.eval_numeric((0,) * g.rank, precision=cfg.precision)
            for k, c in targets[direction].coeffs.items()
        }
        for t in scales:
            pt = tuple(direction * t * x for x in v)
            vals = r.evaluate(pt, precision=cfg.precision, margin=cfg.margin)
            keys = set(vals) | set(target_vals)
            dev = 0.0
            for k in keys:
                a = vals.get(k, 0)
                b = target_vals.get(k, 0)
                dev = max(dev, float(abs(a - b)))
            devs[direction].append(dev)

    monotone = all(d[i + 1] <= d[i] for d in devs.values() for i in range(len(d) - 1))
    converged = all(d[-1] < final_tol for d in devs.values())
    ok = monotone and converged
    return ResidualReport(
        name="limits",
        status="numeric-zero" if ok else "nonzero",
        max_abs=max(d[-1] for d in devs.values()),
        tolerance=final_tol,
        points_used=len(scales) * 2,
        witness=None if ok else {"deviations_positive": devs[1], "deviations_negative": devs[-1]},
        seconds=time.monotonic() - start,
        details={
            "dominant_vector": list(v),
            "scales": [str(t) for t in scales],
            "deviation_to_twisted_constant": devs[1],
            "deviation_to_constant": devs[-1],
        },
    )


# ---------------------------------------------------------------------------
# orchestration

ALL_CHECKS = ("validate", "unitarity", "zero-weight", "cdybe", "mdybe", "lemma", "limits")


def run_checks(
    g: LieSuperalgebra,
    rd: RootDatum,
    spec: RMatrixSpec,
    checks: tuple = ALL_CHECKS,
    cfg: VerifyConfig | None = None,
) -> tuple[bool, list[ResidualReport], dict]:
    """Run the selected residual checks; returns (all passed, reports, extras)."""
    from .rmatrix import construct, shift_to_s
    from .superalgebra import casimir

    cfg = cfg or VerifyConfig()
    reports: list[ResidualReport] = []
    extras: dict = {}

    vrep = validate(spec, g, rd)
    extras["validation"] = vrep.as_dict()
    if "validate" in checks:
        reports.append(
            ResidualReport(
                name="validate",
                status="exact-zero" if vrep.ok else "nonzero",
                witness=None if vrep.ok else {"failures": vrep.failures},
            )
        )
    if not vrep.ok:
        return False, reports, extras

    needs_r = any(c in checks for c in ("unitarity", "zero-weight", "cdybe", "mdybe", "lemma"))
    if needs_r:
        omega = casimir(g, rd)
        r = construct(spec, g, rd, omega=omega)
        if "unitarity" in checks:
            reports.append(unitarity_residual(r, spec.epsilon, omega)[1])
        if "zero-weight" in checks:
            reports.append(zero_weight_residual(r))
        if "cdybe" in checks:
            reports.append(cdybe_residual(r, cfg)[1])
        if "mdybe" in checks:
            s = shift_to_s(r, spec.epsilon, omega)
            reports.append(mdybe_residual(s, spec.epsilon, omega, cfg)[1])
        if "lemma" in checks:
            reports.append(lemma_consistency_check(r, spec.epsilon, omega, cfg))
    if "limits" in checks:
        reports.append(limit_behavior_check(spec, g, rd, cfg))

    ok = all(rep.is_zero for rep in reports)
    return ok, reports, extras

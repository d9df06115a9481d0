"""r-matrix construction from (X, nu, D, epsilon, sign choices) data.

Zero coupling:    r = sum D_ij x_i (x) x_j
                      + sum_{a in X} (-1)^{|a|} (e_a, e_{-a}) / (a, l - nu) e_a (x) e_{-a}

Nonzero coupling: r = sum D_ij x_i (x) x_j + (eps/2) Omega
                      + sum_{a in Delta} phi_a e_a (x) e_{-a}

with phi_a = (eps/2) coth((-1)^{|a|}(e_a,e_{-a})(eps/2)(a, l - nu)) on X and
the constant +-eps/2 branches off X, resolved per positive root by a sign
choice (the negative partner is forced by phi_{-a} = -(-1)^{|a|} phi_a).

X must be closed under negation and under addition of roots; D must be an
antisymmetric closed 2-form.  `validate` checks these exactly and returns
witnesses for every violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import Poly, RationalFunction, ScalarExpr, poly_from_str
from .superalgebra import LieSuperalgebra, RootDatum, casimir, sign_A
from .tensor import Tensor2

Q = Fraction


class ValidationError(ValueError):
    """Raised when construct() is given a spec that fails validation."""

    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("; ".join(f["reason"] for f in report.failures) or "invalid spec")


class MissingSignChoiceError(KeyError):
    """A positive root outside X has no recorded sign choice."""


# ---------------------------------------------------------------------------
# Cartan 2-form


class TwoForm:
    """Antisymmetric N x N matrix of rational functions on the Cartan dual."""

    __slots__ = ("nvars", "entries")

    def __init__(self, nvars: int, upper: dict | None = None):
        """Build from upper-triangle entries {(i, j): RationalFunction}, i < j."""
        self.nvars = nvars
        self.entries: dict = {}
        for (i, j), rf in (upper or {}).items():
            if not (0 <= i < nvars and 0 <= j < nvars):
                raise IndexError(f"entry ({i},{j}) out of range")
            if i == j:
                raise ValueError("diagonal entries of an antisymmetric form must be zero")
            if i > j:
                i, j, rf = j, i, -rf
            if isinstance(rf, Poly):
                rf = RationalFunction(rf)
            if not rf.is_zero():
                self.entries[(i, j)] = self.entries.get((i, j), RationalFunction.zero(nvars)) + rf

    @classmethod
    def zero(cls, nvars: int) -> TwoForm:
        return cls(nvars, {})

    def entry(self, i: int, j: int) -> RationalFunction:
        if i == j:
            return RationalFunction.zero(self.nvars)
        if i < j:
            return self.entries.get((i, j), RationalFunction.zero(self.nvars))
        return -self.entries.get((j, i), RationalFunction.zero(self.nvars))

    def is_zero(self) -> bool:
        return not self.entries

    def closedness_residuals(self) -> list[tuple[tuple[int, int, int], RationalFunction]]:
        """dD components: d_i D_jk + d_j D_ki + d_k D_ij for i < j < k, nonzero only."""
        out = []
        n = self.nvars
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    res = self.entry(j, k).diff(i) + self.entry(k, i).diff(j) + self.entry(i, j).diff(k)
                    if not res.is_zero():
                        out.append(((i, j, k), res))
        return out


# ---------------------------------------------------------------------------
# spec


@dataclass
class RMatrixSpec:
    """Data selecting one member of the solution families.

    X: indices (in the root datum's deterministic order) of the roots where
    phi is non-constant.  sign_choice maps positive root indices outside X to
    +1/-1 and is only consulted when epsilon != 0.
    """

    X: frozenset
    nu: tuple
    D: TwoForm
    epsilon: Fraction = Q(0)
    sign_choice: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = frozenset(self.X)
        self.nu = tuple(Q(v) for v in self.nu)
        self.epsilon = Q(self.epsilon)
        self.sign_choice = {int(k): int(v) for k, v in self.sign_choice.items()}


@dataclass
class ValidationReport:
    ok: bool
    failures: list

    def as_dict(self) -> dict:
        return {"ok": self.ok, "failures": self.failures}


def validate(spec: RMatrixSpec, g: LieSuperalgebra, rd: RootDatum) -> ValidationReport:
    """Exact hypothesis checks: X closure (addition and negation), D shape,
    D closedness, nu dimension, and sign-choice completeness for eps != 0."""
    failures: list[dict] = []
    n = g.rank
    nroots = len(rd)

    for i in spec.X:
        if not 0 <= i < nroots:
            failures.append({"reason": f"X contains invalid root index {i}"})
    X = {i for i in spec.X if 0 <= i < nroots}

    for i in X:
        if rd.neg[i] not in X:
            failures.append(
                {
                    "reason": "X not closed under negation",
                    "witness": {"root": [str(c) for c in rd.roots[i].functional]},
                }
            )
    for i in X:
        for j in X:
            k = rd.add_index(i, j)
            if k is not None and k not in X:
                failures.append(
                    {
                        "reason": "X not closed under root addition",
                        "witness": {
                            "alpha": [str(c) for c in rd.roots[i].functional],
                            "beta": [str(c) for c in rd.roots[j].functional],
                            "sum": [str(c) for c in rd.roots[k].functional],
                        },
                    }
                )

    if len(spec.nu) != n:
        failures.append({"reason": f"nu has {len(spec.nu)} coordinates, expected {n}"})

    if spec.D.nvars != n:
        failures.append({"reason": f"D is {spec.D.nvars}-dimensional, expected {n}"})
    else:
        for (i, j, k), res in spec.D.closedness_residuals():
            failures.append(
                {
                    "reason": "D is not closed",
                    "witness": {"component": [i, j, k], "residual": str(res)},
                }
            )

    if spec.epsilon != 0:
        for i in rd.positive_indices():
            if i not in X and i not in spec.sign_choice:
                failures.append(
                    {
                        "reason": "missing sign choice for positive root outside X",
                        "witness": {"root_index": i, "root": [str(c) for c in rd.roots[i].functional]},
                    }
                )
        for i, v in spec.sign_choice.items():
            if v not in (1, -1):
                failures.append({"reason": f"sign choice for root {i} must be +1 or -1, got {v}"})

    return ValidationReport(ok=not failures, failures=failures)


# ---------------------------------------------------------------------------
# coefficient functions


def root_linear_form(i: int, spec: RMatrixSpec, rd: RootDatum) -> tuple[list[Fraction], Fraction]:
    """(alpha, lambda - nu) as (coordinate coefficients, constant)."""
    coeffs = rd.coroot_coords(i)
    shift = -sum(c * v for c, v in zip(coeffs, spec.nu))
    return coeffs, shift


def phi_zero_coupling(i: int, spec: RMatrixSpec, rd: RootDatum) -> ScalarExpr:
    """(-1)^{|a|} (e_a, e_{-a}) / (a, lambda - nu)."""
    n = rd.g.rank
    coeffs, shift = root_linear_form(i, spec, rd)
    num = Poly.const(n, ((-1) ** rd.roots[i].parity) * rd.pairing[i])
    den = Poly.linear(coeffs, shift)
    return ScalarExpr.from_ratfun(RationalFunction(num, [(den, 1)]))


def phi_coupled(i: int, spec: RMatrixSpec, rd: RootDatum) -> ScalarExpr:
    """The phi table for nonzero coupling.

    a in X:               (eps/2) coth((-1)^{|a|}(e_a,e_{-a})(eps/2)(a, l-nu))
    a not in X, negative: s * eps/2
    a not in X, positive: -s * (-1)^{|a|} * eps/2
    with s the per-pair sign choice recorded on the positive representative.
    """
    eps = spec.epsilon
    if eps == 0:
        raise ValueError("phi_coupled requires epsilon != 0")
    n = rd.g.rank
    root = rd.roots[i]
    if i in spec.X:
        scale = ((-1) ** root.parity) * rd.pairing[i] * eps / 2
        coeffs, shift = root_linear_form(i, spec, rd)
        atom = ScalarExpr.coth([scale * c for c in coeffs], scale * shift)
        return atom * (eps / 2)
    pos = i if root.positive else rd.neg[i]
    if pos not in spec.sign_choice:
        raise MissingSignChoiceError(f"no sign choice for positive root index {pos}")
    s = spec.sign_choice[pos]
    if root.positive:
        return ScalarExpr.const(n, Q(-s * ((-1) ** root.parity), 1) * eps / 2)
    return ScalarExpr.const(n, Q(s) * eps / 2)


def phi(i: int, spec: RMatrixSpec, rd: RootDatum) -> ScalarExpr:
    if spec.epsilon == 0:
        if i in spec.X:
            return phi_zero_coupling(i, spec, rd)
        return ScalarExpr.zero(rd.g.rank)
    return phi_coupled(i, spec, rd)


# ---------------------------------------------------------------------------
# assembly


def _cartan_part(spec: RMatrixSpec, g: LieSuperalgebra) -> dict:
    cells: dict = {}
    cartan = list(g.cartan)
    for (i, j), rf in spec.D.entries.items():
        expr = ScalarExpr.from_ratfun(rf)
        cells[(cartan[i], cartan[j])] = expr
        cells[(cartan[j], cartan[i])] = -expr
    return cells


def construct(spec: RMatrixSpec, g: LieSuperalgebra, rd: RootDatum, omega: Tensor2 | None = None) -> Tensor2:
    """Assemble the r-matrix for the spec; raises ValidationError on bad data."""
    report = validate(spec, g, rd)
    if not report.ok:
        raise ValidationError(report)
    r = Tensor2(g, _cartan_part(spec, g))
    if spec.epsilon != 0:
        omega = omega if omega is not None else casimir(g, rd)
        r = r + omega.scale(spec.epsilon / 2)
        indices = range(len(rd))
    else:
        indices = sorted(spec.X)
    for i in indices:
        f = phi(i, spec, rd)
        if f.symbolically_zero():
            continue
        r = r + Tensor2.from_vectors(g, rd.e[i], rd.e[rd.neg[i]], f)
    return r


def constant_example(g: LieSuperalgebra, rd: RootDatum, eps, which: str = "r") -> Tensor2:
    """The two constant solutions attached to a triangular decomposition.

    which='r':   (eps/2) sum x_i (x) x_i*  +  eps sum_{a>0} e_{-a} (x) e_a
    which='Tsr': its super twist,
                 (eps/2) sum x_i (x) x_i*  +  eps sum_{a>0} (-1)^{|a|} e_a (x) e_{-a}
    """
    eps = Q(eps)
    if eps == 0:
        raise ValueError("constant example needs a nonzero coupling")
    if which not in ("r", "Tsr"):
        raise ValueError("which must be 'r' or 'Tsr'")
    from .superalgebra import invert_matrix

    cells: dict = {}
    cartan = list(g.cartan)
    gram_inv = invert_matrix(g.cartan_gram())
    for k, ck in enumerate(cartan):
        for l, cl in enumerate(cartan):
            v = gram_inv[l][k] * eps / 2
            if v:
                cells[(ck, cl)] = cells.get((ck, cl), Q(0)) + v
    r = Tensor2.from_constant_cells(g, cells)
    for i in rd.positive_indices():
        if which == "r":
            r = r + Tensor2.from_vectors(g, rd.e[rd.neg[i]], rd.e[i], eps)
        else:
            r = r + Tensor2.from_vectors(g, rd.e[i], rd.e[rd.neg[i]], eps * (-1) ** rd.roots[i].parity)
    return r


def shift_to_s(r: Tensor2, eps, omega: Tensor2) -> Tensor2:
    """s = r - (eps/2) Omega."""
    return r - omega.scale(Q(eps) / 2)


# ---------------------------------------------------------------------------
# coefficient identities (exact residuals used by the verifier and tests)


def ode_residual(i: int, spec: RMatrixSpec, rd: RootDatum) -> list[ScalarExpr]:
    """Per-coordinate residual of d(phi_a) + A_a (phi_a^2 - eps^2/4) d(h_a).

    For eps = 0 this is the zero-coupling equation d(phi) + A phi^2 dh.
    Identically zero componentwise for every constructed phi with a in X (and
    for the constant branches, whose square is exactly eps^2/4).
    """
    f = phi(i, spec, rd)
    a = sign_A(rd, i)
    coeffs = rd.coroot_coords(i)
    quad = f * f - ScalarExpr.const(rd.g.rank, spec.epsilon**2 / 4)
    return [f.differentiate(j) + quad * (a * c) for j, c in enumerate(coeffs)]


def functional_equation_residual(i: int, j: int, spec: RMatrixSpec, rd: RootDatum) -> ScalarExpr | None:
    """A_{a+b} phi_a phi_b + (eps^2/4) A_{a+b} A_a A_b
       - phi_{a+b} (A_a phi_b + A_b phi_a), or None if a+b is not a root."""
    k = rd.add_index(i, j)
    if k is None:
        return None
    fa, fb, fs = phi(i, spec, rd), phi(j, spec, rd), phi(k, spec, rd)
    aa, ab, asum = sign_A(rd, i), sign_A(rd, j), sign_A(rd, k)
    n = rd.g.rank
    res = fa * fb * asum - fs * (fb * aa + fa * ab)
    res = res + ScalarExpr.const(n, spec.epsilon**2 / 4 * asum * aa * ab)
    return res


# ---------------------------------------------------------------------------
# JSON spec format
#
# {"algebra": "gl" | "sl", "m": int, "n": int, "epsilon": "p/q",
#  "nu": ["p/q", ...], "X": "all" | "none" | [root indices],
#  "D": [{"i": int, "j": int, "ratfun": '(ratfun "NUM" "DEN")'}, ...],
#  "sign_choice": {"index": "+" | "-"}}
#
# Root indices refer to the deterministic ordering in export_descriptor.
# D coefficients use the s-expression grammar of `scalars` (bare "NUM"/"DEN"
# polynomial strings are also accepted as separate num/den fields).


def spec_to_json(spec: RMatrixSpec, g: LieSuperalgebra) -> dict:
    from .scalars import ScalarExpr, to_sexpr

    return {
        "algebra": g.family,
        "m": g.m,
        "n": g.n,
        "epsilon": str(spec.epsilon),
        "nu": [str(v) for v in spec.nu],
        "X": sorted(spec.X),
        "D": [
            {"i": i, "j": j, "ratfun": to_sexpr(ScalarExpr.from_ratfun(rf))}
            for (i, j), rf in sorted(spec.D.entries.items())
        ],
        "sign_choice": {str(k): ("+" if v > 0 else "-") for k, v in sorted(spec.sign_choice.items())},
    }


def _parse_d_entry(entry: dict, n: int) -> RationalFunction:
    from .scalars import from_sexpr

    if "ratfun" in entry:
        expr = from_sexpr(entry["ratfun"], n)
        return expr.as_ratfun()  # raises NotRationalError on coth atoms
    num = poly_from_str(entry["num"], n)
    den = poly_from_str(entry.get("den", "1"), n)
    if den.is_zero():
        raise ZeroDivisionError("D entry has zero denominator")
    return RationalFunction(num, [(den, 1)])


def spec_from_json(doc: dict, g: LieSuperalgebra, rd: RootDatum) -> RMatrixSpec:
    n = g.rank
    x_field = doc.get("X", "none")
    if x_field == "all":
        X = frozenset(range(len(rd)))
    elif x_field == "none":
        X = frozenset()
    else:
        X = frozenset(int(i) for i in x_field)
    nu = tuple(Q(v) for v in doc.get("nu", ["0"] * n))
    upper: dict = {}
    for entry in doc.get("D", []):
        i, j = int(entry["i"]), int(entry["j"])
        if (i, j) in upper or (j, i) in upper:
            raise ValueError(f"duplicate D entry ({i},{j})")
        upper[(i, j)] = _parse_d_entry(entry, n)
    sign_choice = {}
    for k, v in doc.get("sign_choice", {}).items():
        if v not in ("+", "-", 1, -1, "+1", "-1"):
            raise ValueError(f"sign choice for root {k} must be '+' or '-'")
        sign_choice[int(k)] = 1 if v in ("+", 1, "+1") else -1
    return RMatrixSpec(
        X=X,
        nu=nu,
        D=TwoForm(n, upper),
        epsilon=Q(doc.get("epsilon", "0")),
        sign_choice=sign_choice,
    )

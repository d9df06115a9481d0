"""Concrete matrix Lie superalgebras with invariant form and root data.

Algebras are gl(m|n) (matrix units, supercommutator, supertrace form) and its
supertraceless subalgebra sl(m|n) for m != n.  Elements are sparse vectors
{basis index: Fraction}.  All arithmetic is exact.

Root data follow the normalization [e_a, e_{-a}] = (e_a, e_{-a}) h_a with
(e_a, e_{-a}) = 1 for positive roots, and the sign bookkeeping
A_a = (-1)^{|a|} for positive a, A_a = 1 for negative a.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Q = Fraction

EVEN, ODD = 0, 1

Vector = dict  # basis index -> Fraction


class DegenerateFormError(ValueError):
    """The invariant bilinear form is degenerate for the requested algebra."""


class NonDiagonalizableError(ValueError):
    """The Cartan does not act diagonally on the given basis."""


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def solve_linear(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve matrix @ x = rhs over Fraction; raises DegenerateFormError if singular."""
    n = len(matrix)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise DegenerateFormError("singular linear system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def invert_matrix(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(matrix)
    cols = []
    for j in range(n):
        e = [Q(1) if i == j else Q(0) for i in range(n)]
        cols.append(solve_linear(matrix, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def determinant(matrix: list[list[Fraction]]) -> Fraction:
    n = len(matrix)
    m = [row[:] for row in matrix]
    det = Q(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Q(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = Q(1) / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return det


# ---------------------------------------------------------------------------
# the algebra container


@dataclass
class LieSuperalgebra:
    """Basis-indexed Lie superalgebra with invariant form.

    structure[(i, j)] is the sparse expansion of [b_i, b_j]; form[i][j] is
    (b_i, b_j); cartan lists the indices of the Cartan basis (even, abelian).
    Immutable after construction by convention.
    """

    dim: int
    parity: tuple[int, ...]
    structure: dict
    form: tuple
    cartan: tuple[int, ...]
    basis_names: tuple[str, ...]
    family: str = ""
    m: int = 0
    n: int = 0

    @property
    def rank(self) -> int:
        return len(self.cartan)

    def bracket_basis(self, i: int, j: int) -> Vector:
        return self.structure.get((i, j), {})

    def bracket(self, x: Vector, y: Vector) -> Vector:
        out: Vector = {}
        for i, cx in x.items():
            for j, cy in y.items():
                for k, c in self.bracket_basis(i, j).items():
                    s = out.get(k, Q(0)) + cx * cy * c
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return out

    def form_value(self, x: Vector, y: Vector) -> Fraction:
        acc = Q(0)
        for i, cx in x.items():
            row = self.form[i]
            for j, cy in y.items():
                acc += cx * cy * row[j]
        return acc

    def vector_parity(self, x: Vector) -> int:
        """Parity of a homogeneous vector; raises on mixed parity."""
        parities = {self.parity[i] for i, c in x.items() if c}
        if not parities:
            return EVEN
        if len(parities) > 1:
            raise ValueError("vector is not parity homogeneous")
        return parities.pop()

    def cartan_gram(self) -> list[list[Fraction]]:
        return [[self.form[i][j] for j in self.cartan] for i in self.cartan]


def _supercommutator_matrix(a: dict, b: dict, parity_a: int, parity_b: int, size: int) -> dict:
    """[a, b] = ab - (-1)^{|a||b|} ba on sparse {(row, col): Fraction} matrices."""
    sign = -1 if parity_a and parity_b else 1

    def matmul(x, y):
        out: dict = {}
        for (r, c), v in x.items():
            for (r2, c2), w in y.items():
                if c == r2:
                    s = out.get((r, c2), Q(0)) + v * w
                    if s:
                        out[(r, c2)] = s
                    else:
                        out.pop((r, c2), None)
        return out

    ab = matmul(a, b)
    ba = matmul(b, a)
    out = dict(ab)
    for key, v in ba.items():
        s = out.get(key, Q(0)) - sign * v
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return out


def _supertrace(mat: dict, m: int, n: int) -> Fraction:
    acc = Q(0)
    for (r, c), v in mat.items():
        if r == c:
            acc += v if r < m else -v
    return acc


def build_gl(m: int, n: int) -> LieSuperalgebra:
    """gl(m|n): matrix units E_ij, supercommutator, supertrace form.

    Rows/columns 1..m are even, m+1..m+n odd; |E_ij| = |i| + |j| mod 2;
    the Cartan is spanned by the diagonal units.
    """
    if m + n < 2:
        raise ValueError("need m + n >= 2")
    d = m + n
    units = [(i, j) for i in range(d) for j in range(d)]
    index = {u: k for k, u in enumerate(units)}
    row_parity = [EVEN if i < m else ODD for i in range(d)]
    parity = tuple((row_parity[i] + row_parity[j]) % 2 for i, j in units)
    names = tuple(f"E{i + 1}{j + 1}" for i, j in units)

    structure: dict = {}
    for a, (i, j) in enumerate(units):
        for b, (k, l) in enumerate(units):
            out: Vector = {}
            if j == k:
                out[index[(i, l)]] = out.get(index[(i, l)], Q(0)) + 1
            if l == i:
                sign = -1 if parity[a] and parity[b] else 1
                key = index[(k, j)]
                out[key] = out.get(key, Q(0)) - sign
            out = {kk: vv for kk, vv in out.items() if vv}
            if out:
                structure[(a, b)] = out

    s = [Q(1) if i < m else Q(-1) for i in range(d)]
    form = tuple(
        tuple(s[i] if (j == k and i == l) else Q(0) for (k, l) in units) for (i, j) in units
    )
    cartan = tuple(index[(i, i)] for i in range(d))
    return LieSuperalgebra(
        dim=d * d,
        parity=parity,
        structure=structure,
        form=form,
        cartan=cartan,
        basis_names=names,
        family="gl",
        m=m,
        n=n,
    )


def build_sl(m: int, n: int) -> LieSuperalgebra:
    """sl(m|n), m != n: supertraceless matrices with the restricted str form.

    Basis: off-diagonal units E_ij plus the supertraceless diagonals
    h_i = E_ii - s_i/(m-n) * Id for i < m+n-1.
    """
    if m == n:
        raise DegenerateFormError("the supertrace form degenerates on sl(n|n)")
    if m + n < 2:
        raise ValueError("need m + n >= 2")
    d = m + n
    row_parity = [EVEN if i < m else ODD for i in range(d)]
    s = [Q(1) if i < m else Q(-1) for i in range(d)]

    basis_mats: list[dict] = []
    parity: list[int] = []
    names: list[str] = []
    offdiag_index: dict = {}
    for i in range(d):
        for j in range(d):
            if i != j:
                offdiag_index[(i, j)] = len(basis_mats)
                basis_mats.append({(i, j): Q(1)})
                parity.append((row_parity[i] + row_parity[j]) % 2)
                names.append(f"E{i + 1}{j + 1}")
    cartan_start = len(basis_mats)
    for i in range(d - 1):
        mat = {(k, k): -s[i] / (m - n) for k in range(d)}
        mat[(i, i)] = mat.get((i, i), Q(0)) + 1
        basis_mats.append({k: v for k, v in mat.items() if v})
        parity.append(EVEN)
        names.append(f"H{i + 1}")

    dim = len(basis_mats)

    def decompose(mat: dict) -> Vector:
        # off-diagonal entries map to unit vectors; the supertraceless diagonal
        # part X has X = sum_j (X_jj - X_{dd}) h_j (valid because str X = 0)
        out: Vector = {}
        diag = [mat.get((k, k), Q(0)) for k in range(d)]
        for (r, c), v in mat.items():
            if r != c and v:
                out[offdiag_index[(r, c)]] = v
        last = diag[d - 1]
        for jj in range(d - 1):
            cc = diag[jj] - last
            if cc:
                out[cartan_start + jj] = cc
        return out

    structure: dict = {}
    for a in range(dim):
        for b in range(dim):
            res = _supercommutator_matrix(basis_mats[a], basis_mats[b], parity[a], parity[b], d)
            if res:
                out = decompose(res)
                if out:
                    structure[(a, b)] = out

    # (x, y) = str(xy), computed directly from the matrix product
    def matmul(x, y):
        out: dict = {}
        for (r, c), v in x.items():
            for (r2, c2), w in y.items():
                if c == r2:
                    out[(r, c2)] = out.get((r, c2), Q(0)) + v * w
        return out

    form = tuple(
        tuple(_supertrace(matmul(basis_mats[a], basis_mats[b]), m, n) for b in range(dim))
        for a in range(dim)
    )
    gram = [[form[i][j] for j in range(dim)] for i in range(dim)]
    if determinant(gram) == 0:
        raise DegenerateFormError("restricted supertrace form is degenerate")

    return LieSuperalgebra(
        dim=dim,
        parity=tuple(parity),
        structure=structure,
        form=form,
        cartan=tuple(range(cartan_start, dim)),
        basis_names=tuple(names),
        family="sl",
        m=m,
        n=n,
    )


def bracket(g: LieSuperalgebra, x: Vector, y: Vector) -> Vector:
    return g.bracket(x, y)


# ---------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class Root:
    """A root as a functional on the Cartan basis, with parity and sign."""

    functional: tuple
    parity: int
    positive: bool


@dataclass
class RootDatum:
    """Roots of g with normalized root vectors and coroots.

    Roots are ordered by lexicographically decreasing functional, so positive
    roots come first; this ordering is the stable index space used by
    serialized r-matrix specs.  For every root i: e[i] is the root vector,
    h_coroot[i] the Cartan element with (h_i, x) = root_i(x), pairing[i] the
    value (e_i, e_{-i}), and neg[i] the index of the opposite root.
    """

    g: LieSuperalgebra
    roots: list[Root]
    e: list[Vector]
    h_coroot: list[Vector]
    pairing: list[Fraction]
    neg: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.roots)

    def index_of(self, functional: Sequence[Fraction]) -> int:
        functional = tuple(Q(c) for c in functional)
        for i, r in enumerate(self.roots):
            if r.functional == functional:
                return i
        raise KeyError(f"no root with functional {functional}")

    def positive_indices(self) -> list[int]:
        return [i for i, r in enumerate(self.roots) if r.positive]

    def coroot_coords(self, i: int) -> list[Fraction]:
        """h_alpha in Cartan-basis coordinates: the linear form (alpha, .)."""
        h = self.h_coroot[i]
        return [h.get(c, Q(0)) for c in self.g.cartan]

    def add_index(self, i: int, j: int) -> int | None:
        """Index of root_i + root_j if it is a root, else None."""
        total = tuple(a + b for a, b in zip(self.roots[i].functional, self.roots[j].functional))
        for k, r in enumerate(self.roots):
            if r.functional == total:
                return k
        return None


def sign_A(rd: RootDatum, i: int) -> int:
    """A_alpha: (-1)^{|alpha|} for positive alpha, +1 for negative."""
    r = rd.roots[i]
    if r.positive:
        return -1 if r.parity else 1
    return 1


def root_decomposition(g: LieSuperalgebra) -> RootDatum:
    """Split the non-Cartan part into one-dimensional simultaneous ad-eigenspaces.

    Positivity is lexicographic in the Cartan coordinates of the functional
    (the distinguished Borel for matrix-unit bases).  For each positive root
    the opposite vector is rescaled so that (e_a, e_{-a}) = 1, and coroots
    solve (h_a, x) = a(x) against the Cartan Gram matrix.
    """
    cartan = list(g.cartan)
    non_cartan = [b for b in range(g.dim) if b not in g.cartan]
    weight_of: dict[int, tuple] = {}
    for b in non_cartan:
        weight = []
        for c in cartan:
            v = g.bracket_basis(c, b)
            extra = {k for k in v if k != b and v[k]}
            if extra:
                raise NonDiagonalizableError(f"[{g.basis_names[c]}, {g.basis_names[b]}] not diagonal")
            weight.append(v.get(b, Q(0)))
        if all(w == 0 for w in weight):
            raise NonDiagonalizableError(f"non-Cartan basis vector {g.basis_names[b]} has zero weight")
        weight_of[b] = tuple(weight)

    spaces: dict[tuple, list[int]] = {}
    for b, w in weight_of.items():
        spaces.setdefault(w, []).append(b)
    for w, vs in spaces.items():
        if len(vs) != 1:
            raise NonDiagonalizableError(f"root space of weight {w} has dimension {len(vs)}")
        if tuple(-c for c in w) not in spaces:
            raise NonDiagonalizableError(f"root {w} has no opposite")

    ordered = sorted(spaces, reverse=True)  # lex-descending: positives first
    roots: list[Root] = []
    vectors: list[Vector] = []
    for w in ordered:
        b = spaces[w][0]
        positive = next(c for c in w if c != 0) > 0
        roots.append(Root(functional=w, parity=g.parity[b], positive=positive))
        vectors.append({b: Q(1)})

    index = {r.functional: i for i, r in enumerate(roots)}
    neg = [index[tuple(-c for c in roots[i].functional)] for i in range(len(roots))]

    # normalize (e_a, e_{-a}) = 1 for positive a by rescaling e_{-a}
    for i, r in enumerate(roots):
        if r.positive:
            j = neg[i]
            val = g.form_value(vectors[i], vectors[j])
            if val == 0:
                raise DegenerateFormError(f"form does not pair root {r.functional} with its opposite")
            vectors[j] = {k: v / val for k, v in vectors[j].items()}

    gram = g.cartan_gram()
    if determinant(gram) == 0:
        raise DegenerateFormError("form is degenerate on the Cartan")
    coroots: list[Vector] = []
    pairings: list[Fraction] = []
    for i, r in enumerate(roots):
        coeffs = solve_linear(gram, list(r.functional))
        coroots.append({c: coeffs[k] for k, c in enumerate(cartan) if coeffs[k]})
        pairings.append(g.form_value(vectors[i], vectors[neg[i]]))

    return RootDatum(g=g, roots=roots, e=vectors, h_coroot=coroots, pairing=pairings, neg=neg)


def casimir(g: LieSuperalgebra, rd: RootDatum):
    """The invariant element of g (x) g for the form.

    Omega = sum_k x_k (x) x^k  +  sum_a A_a e_a (x) e_{-a}, with {x^k} the
    form-dual Cartan basis.
    """
    from . import tensor

    nvars = g.rank
    gram_inv = invert_matrix(g.cartan_gram())
    cells: dict = {}
    cartan = list(g.cartan)
    for k, ck in enumerate(cartan):
        for l, cl in enumerate(cartan):
            v = gram_inv[l][k]
            if v:
                cells[(ck, cl)] = cells.get((ck, cl), Q(0)) + v
    for i in range(len(rd)):
        a = sign_A(rd, i)
        for bi, ci in rd.e[i].items():
            for bj, cj in rd.e[rd.neg[i]].items():
                key = (bi, bj)
                cells[key] = cells.get(key, Q(0)) + a * ci * cj
    return tensor.Tensor2.from_constant_cells(g, cells)


# ---------------------------------------------------------------------------
# invariant checks (exact, brute force over basis triples)


def validate_algebra(g: LieSuperalgebra) -> list[str]:
    """Exhaustive exact checks of the algebra axioms; returns violations."""
    bad: list[str] = []
    p = g.parity

    def name(i):
        return g.basis_names[i]

    for (i, j), v in g.structure.items():
        for k, c in v.items():
            if c and (p[i] + p[j]) % 2 != p[k]:
                bad.append(f"parity: [{name(i)},{name(j)}] hits {name(k)}")

    for i in range(g.dim):
        for j in range(g.dim):
            lhs = g.bracket_basis(i, j)
            rhs = g.bracket_basis(j, i)
            sign = -1 if p[i] and p[j] else 1
            keys = set(lhs) | set(rhs)
            for k in keys:
                if lhs.get(k, Q(0)) != -sign * rhs.get(k, Q(0)):
                    bad.append(f"skew: [{name(i)},{name(j)}] vs [{name(j)},{name(i)}]")
                    break

    for i in range(g.dim):
        for j in range(g.dim):
            if g.form[i][j] != ((-1) ** (p[i] * p[j])) * g.form[j][i]:
                bad.append(f"supersymmetry: ({name(i)},{name(j)})")
            if p[i] != p[j] and g.form[i][j] != 0:
                bad.append(f"evenness: ({name(i)},{name(j)}) != 0")

    ei = {i: {i: Q(1)} for i in range(g.dim)}
    for i in range(g.dim):
        for j in range(g.dim):
            bij = g.bracket_basis(i, j)
            for k in range(g.dim):
                lhs = sum((c * g.form[l][k] for l, c in bij.items()), Q(0))
                rhs = g.form_value(ei[i], g.bracket_basis(j, k))
                if lhs != rhs:
                    bad.append(f"invariance: ([{name(i)},{name(j)}],{name(k)})")

    gram = [[g.form[i][j] for j in range(g.dim)] for i in range(g.dim)]
    if determinant(gram) == 0:
        bad.append("form is degenerate")

    for c in g.cartan:
        if p[c] != EVEN:
            bad.append(f"cartan vector {name(c)} is odd")
        for c2 in g.cartan:
            if g.bracket_basis(c, c2):
                bad.append(f"cartan not abelian: [{name(c)},{name(c2)}]")

    return bad


def check_jacobi(g: LieSuperalgebra) -> list[tuple[int, int, int]]:
    """Super Jacobi over all basis triples; returns offending triples.

    (-1)^{|x||z|}[x,[y,z]] + (-1)^{|y||x|}[y,[z,x]] + (-1)^{|z||y|}[z,[x,y]] = 0
    """
    p = g.parity
    bad = []
    for i in range(g.dim):
        xi = {i: Q(1)}
        for j in range(g.dim):
            xj = {j: Q(1)}
            for k in range(g.dim):
                xk = {k: Q(1)}
                acc: Vector = {}
                for vec, sign in (
                    (g.bracket(xi, g.bracket(xj, xk)), (-1) ** (p[i] * p[k])),
                    (g.bracket(xj, g.bracket(xk, xi)), (-1) ** (p[j] * p[i])),
                    (g.bracket(xk, g.bracket(xi, xj)), (-1) ** (p[k] * p[j])),
                ):
                    for l, c in vec.items():
                        s = acc.get(l, Q(0)) + sign * c
                        if s:
                            acc[l] = s
                        else:
                            acc.pop(l, None)
                if acc:
                    bad.append((i, j, k))
    return bad


def structure_constant_identity_report(g: LieSuperalgebra, rd: RootDatum) -> dict:
    """Check the three derived identities relating opposite-root structure
    constants to (h_a, h_b), for every root pair with C_{a,b}^{a+b} != 0.

    Returns {"violations": [...], "zero_h_pairings": [...], "pairs_checked": n};
    pairs where (h_a, h_b) = 0 are recorded, not asserted against.
    """

    def c_coeff(i: int, j: int, k: int) -> Fraction:
        # coefficient of e_k in [e_i, e_j]
        v = g.bracket(rd.e[i], rd.e[j])
        ek = rd.e[k]
        (bk, ck), = ek.items()
        return v.get(bk, Q(0)) / ck

    violations = []
    zero_h = []
    checked = 0
    nroots = len(rd)
    for i in range(nroots):
        for j in range(nroots):
            k = rd.add_index(i, j)
            if k is None:
                continue
            c_top = c_coeff(i, j, k)
            if c_top == 0:
                continue
            checked += 1
            pa, pb = rd.roots[i].parity, rd.roots[j].parity
            hh = g.form_value(rd.h_coroot[i], rd.h_coroot[j])
            if hh == 0:
                zero_h.append((rd.roots[i].functional, rd.roots[j].functional))
            ni, nj, nk = rd.neg[i], rd.neg[j], rd.neg[k]
            s_ab = (-1) ** (pa * pb)
            checks = (
                (
                    "C(-b,a+b)^a",
                    c_coeff(nj, k, i),
                    s_ab * ((-1) ** pb) * sign_A(rd, nj) * hh / c_top,
                ),
                (
                    "C(-a,a+b)^b",
                    c_coeff(ni, k, j),
                    -((-1) ** pa) * sign_A(rd, ni) * hh / c_top,
                ),
                (
                    "C(-a,-b)^(-a-b)",
                    c_coeff(ni, nj, nk),
                    s_ab * ((-1) ** (pa + pb)) * sign_A(rd, k) * sign_A(rd, ni) * sign_A(rd, nj) * hh / c_top,
                ),
            )
            for label, got, expected in checks:
                if got != expected:
                    violations.append(
                        {
                            "identity": label,
                            "alpha": [str(c) for c in rd.roots[i].functional],
                            "beta": [str(c) for c in rd.roots[j].functional],
                            "got": str(got),
                            "expected": str(expected),
                        }
                    )
    return {"violations": violations, "zero_h_pairings": zero_h, "pairs_checked": checked}


# ---------------------------------------------------------------------------
# descriptor export


def export_descriptor(g: LieSuperalgebra, rd: RootDatum | None = None) -> dict:
    """JSON-ready description of the algebra and its deterministic root order."""
    out = {
        "family": g.family,
        "m": g.m,
        "n": g.n,
        "dim": g.dim,
        "basis": list(g.basis_names),
        "parities": list(g.parity),
        "cartan_indices": list(g.cartan),
        "structure": [
            {"i": i, "j": j, "k": k, "c": str(c)}
            for (i, j), v in sorted(g.structure.items())
            for k, c in sorted(v.items())
        ],
        "form": [[str(v) for v in row] for row in g.form],
    }
    if rd is not None:
        out["roots"] = [
            {
                "index": i,
                "functional": [str(c) for c in r.functional],
                "parity": r.parity,
                "positive": r.positive,
                "vector": {str(b): str(c) for b, c in sorted(rd.e[i].items())},
                "coroot": {str(b): str(c) for b, c in sorted(rd.h_coroot[i].items())},
                "pairing": str(rd.pairing[i]),
                "negative_index": rd.neg[i],
            }
            for i, r in enumerate(rd.roots)
        ]
    return out

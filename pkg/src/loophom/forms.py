"""Intersection forms of (n-1)-connected 2n-manifolds.

An :class:`IntersectionForm` is the only mathematical input of the engine: the
half-dimension ``n`` and the matrix ``C`` of the cup-product pairing on the middle
cohomology with respect to a basis ``a_1, ..., a_m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import errors
from .linalg import bareiss_det
from .rings import ZZ, CoefficientRing, parse_ring

EXCLUDED_DIMENSIONS = frozenset({2, 4, 8})

E8 = (
    (2, -1, 0, 0, 0, 0, 0, 0),
    (-1, 2, -1, 0, 0, 0, 0, 0),
    (0, -1, 2, -1, 0, 0, 0, 0),
    (0, 0, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, -1),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, 0),
    (0, 0, 0, 0, -1, 0, 0, 2),
)


@dataclass(frozen=True)
class IntersectionForm:
    n: int
    matrix: tuple  # tuple of row tuples
    ring: CoefficientRing = ZZ
    warnings: tuple = field(default=(), compare=False)

    @property
    def m(self) -> int:
        return len(self.matrix)

    @property
    def skew(self) -> bool:
        return self.n % 2 == 1

    def c(self, i: int, j: int) -> int:
        return self.matrix[i][j]

    def det(self) -> int:
        return bareiss_det(self.matrix)

    def with_ring(self, ring) -> "IntersectionForm":
        return replace(self, ring=parse_ring(ring))

    def to_json(self):
        return {
            "n": self.n,
            "m": self.m,
            "intersection_matrix": [list(r) for r in self.matrix],
        }


def _as_matrix(raw) -> tuple:
    if not isinstance(raw, (list, tuple)) or not raw:
        raise errors.NonSquareMatrix("intersection matrix must be a nonempty list of rows")
    m = len(raw)
    rows = []
    for r in raw:
        if not isinstance(r, (list, tuple)) or len(r) != m:
            raise errors.NonSquareMatrix(f"intersection matrix is not {m}x{m}")
        for x in r:
            if isinstance(x, bool) or not isinstance(x, int):
                raise errors.ValidationError(f"matrix entries must be integers, got {x!r}")
        rows.append(tuple(r))
    return tuple(rows)


def make_form(
    n: int,
    matrix,
    ring=ZZ,
    *,
    force: bool = False,
    allow_nonunimodular: bool = False,
) -> IntersectionForm:
    """Validate ``(n, C, ring)`` and build the form.

    ``force`` admits the dimensions excluded by the loop-space theorem (n < 3 or
    n in {4, 8}); ``allow_nonunimodular`` admits |det C| != 1.  Both attach a
    warning to the returned form instead of raising.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise errors.ValidationError(f"n must be a positive integer, got {n!r}")
    C = _as_matrix(matrix)
    m = len(C)
    ring = parse_ring(ring)
    warnings = []

    if n % 2 == 1 and m % 2 == 1:
        raise errors.OddRankSkew(f"n={n} is odd but m={m} is odd: no nonsingular skew form exists", n=n, m=m)

    if n < 3 or n in EXCLUDED_DIMENSIONS:
        if not force:
            raise errors.ExcludedDimension(f"n={n} is outside the supported range (n >= 3, n not in {{4, 8}})", n=n)
        warnings.append(f"n={n} is outside the theorem's hypotheses; results are unsupported")

    sign = -1 if n % 2 == 1 else 1
    for i in range(m):
        for j in range(i, m):
            if C[j][i] != sign * C[i][j]:
                kind = "skew-symmetric" if sign < 0 else "symmetric"
                raise errors.SymmetryViolation(f"C must be {kind} for n={n}; entry ({i + 1},{j + 1}) violates this", i=i + 1, j=j + 1)

    det = bareiss_det(C)
    if abs(det) != 1:
        if not allow_nonunimodular:
            raise errors.NotUnimodular(f"|det C| = {abs(det)} != 1", det=det)
        warnings.append(f"non-unimodular form (det {det}); no manifold realises it")

    return IntersectionForm(n, C, ring, tuple(warnings))


def validate(raw: dict, *, force: bool = False, allow_nonunimodular: bool = False) -> IntersectionForm:
    """Build a form from a parsed JSON config document."""
    if not isinstance(raw, dict):
        raise errors.ValidationError("config must be a JSON object")
    for key in ("n", "intersection_matrix"):
        if key not in raw:
            raise errors.ValidationError(f"config is missing {key!r}")
    return make_form(
        raw["n"],
        raw["intersection_matrix"],
        raw.get("ring", "Z"),
        force=force or bool(raw.get("force", False)),
        allow_nonunimodular=allow_nonunimodular or bool(raw.get("allow_nonunimodular", False)),
    )


def hyperbolic_matrix(n: int, g: int) -> tuple:
    sign = -1 if n % 2 == 1 else 1
    m = 2 * g
    rows = [[0] * m for _ in range(m)]
    for b in range(g):
        rows[2 * b][2 * b + 1] = 1
        rows[2 * b + 1][2 * b] = sign
    return tuple(tuple(r) for r in rows)


PRESETS = ("hyperbolic", "e8", "diag")


def preset(name: str, n: int, ring=ZZ, *, g: int = 1, entries=None, force: bool = False, allow_nonunimodular: bool = False) -> IntersectionForm:
    """Catalog forms: ``hyperbolic`` (g hyperbolic blocks), ``e8`` and ``diag``."""
    if name == "hyperbolic":
        if g < 1:
            raise errors.ValidationError("hyperbolic preset needs g >= 1")
        C = hyperbolic_matrix(n, g)
    elif name == "e8":
        if n % 2:
            raise errors.ParityMismatch(f"e8 is symmetric; n={n} is odd and needs a skew form", n=n)
        C = E8
    elif name == "diag":
        if n % 2:
            raise errors.ParityMismatch(f"diagonal forms are symmetric; n={n} is odd", n=n)
        entries = list(entries or [1])
        C = tuple(tuple(entries[i] if i == j else 0 for j in range(len(entries))) for i in range(len(entries)))
    else:
        raise errors.UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return make_form(n, C, ring, force=force, allow_nonunimodular=allow_nonunimodular)


def base_change(form: IntersectionForm, P) -> IntersectionForm:
    """The same form in the basis given by the columns of ``P``: ``P^T C P``."""
    P = _as_matrix(P)
    if len(P) != form.m:
        raise errors.DimensionMismatch(f"change of basis must be {form.m}x{form.m}")
    if abs(bareiss_det(P)) != 1:
        raise errors.NotUnimodularChange("|det P| != 1")
    m = form.m
    C = form.matrix
    CP = [[sum(C[i][k] * P[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    new = tuple(tuple(sum(P[k][i] * CP[k][j] for k in range(m)) for j in range(m)) for i in range(m))
    return replace(form, matrix=new)


def permutation_matrix(perm) -> tuple:
    """Matrix sending basis vector ``e_perm[j]`` to column ``j``."""
    m = len(perm)
    return tuple(tuple(int(perm[j] == i) for j in range(m)) for i in range(m))


def permute(form: IntersectionForm, perm) -> IntersectionForm:
    """Relabel generators: new generator ``j`` is old generator ``perm[j]``."""
    return base_change(form, permutation_matrix(perm))


# --------------------------------------------------------------------------
# generator adaptation for integral computations


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _row_ops_to_last(vec) -> list:
    """Unimodular ``G`` with ``G @ vec == e_last`` for a primitive integer vector."""
    k = len(vec)
    x = list(vec)
    G = [[int(i == j) for j in range(k)] for i in range(k)]
    last = k - 1
    for i in range(k - 1):
        a, b = x[i], x[last]
        if a == 0:
            continue
        g, p, q = _xgcd(a, b)
        # [[b/g, -a/g], [p, q]] has determinant 1
        ri, rl = G[i], G[last]
        G[i] = [(b // g) * s - (a // g) * t for s, t in zip(ri, rl)]
        G[last] = [p * s + q * t for s, t in zip(ri, rl)]
        x[i], x[last] = 0, g
    if x[last] == -1:
        G[last] = [-t for t in G[last]]
        x[last] = 1
    if x[last] != 1:
        raise ValueError(f"vector {vec} is not primitive")
    return G


def _inverse(M) -> list:
    from .linalg import inverse_unimodular

    return inverse_unimodular([list(r) for r in M])


def is_adapted(form: IntersectionForm) -> bool:
    """True when the lex-leading word of the relation is u_m u_b (b != m) with unit coefficient."""
    row = form.matrix[-1]
    m = form.m
    if row[m - 1] != 0:
        return False
    b = max((j for j in range(m) if row[j]), default=None)
    return b is not None and abs(row[b]) == 1


def _isotropic_vector(form: IntersectionForm, bound: int):
    C = form.matrix
    m = form.m
    if form.skew:
        return tuple(int(i == m - 1) for i in range(m))
    import itertools
    from math import gcd

    def q(v):
        return sum(v[i] * C[i][j] * v[j] for i in range(m) for j in range(m))

    for i in range(m):
        if C[i][i] == 0:
            return tuple(int(k == i) for k in range(m))
    for b in range(1, bound + 1):
        for v in itertools.product(range(-b, b + 1), repeat=m):
            if max(abs(t) for t in v) != b:
                continue
            # first nonzero entry positive: v and -v are equivalent
            first = next(t for t in v if t)
            if first < 0:
                continue
            g = 0
            for t in v:
                g = gcd(g, t)
            if g == 1 and q(v) == 0:
                return v
    return None


def adapted_basis(form: IntersectionForm, bound: int = 3):
    """A unimodular ``P`` making ``P^T C P`` adapted, or ``None``.

    The new last basis vector is a primitive isotropic vector ``v`` and the new
    second-to-last vector ``w`` pairs with it to 1; every other new basis vector
    pairs with ``v`` to 0.  In such a basis the relation has leading word
    ``u_m u_{m-1}`` with coefficient 1, so it is a Groebner basis over Z by itself.
    Skew forms always admit this; symmetric forms need an isotropic vector, found
    by a search over the box ``[-bound, bound]^m``.
    """
    m = form.m
    if m < 2 or is_adapted(form):
        return None
    if not form.skew and m > 6:
        return None
    v = _isotropic_vector(form, bound)
    if v is None:
        return None
    C = form.matrix
    phi = [sum(v[i] * C[i][j] for i in range(m)) for j in range(m)]
    G = _row_ops_to_last(phi)
    U = [list(r) for r in zip(*G)]  # U = G^T, so phi @ U = e_m
    Uinv = _inverse(U)
    c = [sum(Uinv[i][k] * v[k] for k in range(m)) for i in range(m)]
    s = c[: m - 1]
    Ws = _inverse(_row_ops_to_last(s))  # last column is s
    K = [[sum(U[i][k] * Ws[k][j] for k in range(m - 1)) for j in range(m - 1)] for i in range(m)]
    cols = [[K[i][j] for i in range(m)] for j in range(m - 2)]
    cols.append([U[i][m - 1] for i in range(m)])
    cols.append([K[i][m - 2] for i in range(m)])
    P = tuple(tuple(cols[j][i] for j in range(m)) for i in range(m))
    return P


def _matmul(A, B) -> tuple:
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))) for i in range(len(A)))


def _max_entry(form: IntersectionForm) -> int:
    return max(abs(x) for r in form.matrix for x in r)


def reduced_basis(form: IntersectionForm, scale: int = 2**24):
    """A unimodular ``P`` making the entries of ``P^T C P`` small.

    LLL-reduces Z^m for the positive definite majorant ``V |Lambda| V^T`` of C,
    which bounds every entry of the new matrix by the product of two reduced
    majorant lengths.  Returns ``None`` when nothing is gained.
    """
    import numpy as np
    from sympy import ZZ as SZZ
    from sympy.polys.matrices import DomainMatrix

    m = form.m
    C = np.array(form.matrix, dtype=float)
    if form.skew:
        # -C^2 = C^T C is positive definite and its square root is the majorant
        vals, vecs = np.linalg.eigh(C.T @ C)
        majorant = vecs @ np.diag(np.sqrt(np.abs(vals))) @ vecs.T
    else:
        vals, vecs = np.linalg.eigh(C)
        majorant = vecs @ np.diag(np.abs(vals)) @ vecs.T
    L = np.linalg.cholesky((majorant + majorant.T) / 2)
    rows = [[SZZ(int(round(scale * L[i, j]))) for j in range(m)] for i in range(m)]
    _, T = DomainMatrix(rows, (m, m), SZZ).lll_transform()
    T = [[int(x) for x in r] for r in T.to_list()]
    P = tuple(tuple(T[j][i] for j in range(m)) for i in range(m))
    if abs(bareiss_det(P)) != 1:
        return None
    if _max_entry(base_change(form, P)) >= _max_entry(form):
        return None
    return P


def _unit_vector(form: IntersectionForm, bound: int):
    import itertools

    C, m = form.matrix, form.m
    for i in range(m):
        if abs(C[i][i]) == 1:
            return tuple(int(k == i) for k in range(m))
    for v in itertools.product(range(-bound, bound + 1), repeat=m):
        if any(v) and abs(sum(v[i] * C[i][j] * v[j] for i in range(m) for j in range(m))) == 1:
            return v
    return None


def unit_splitting(form: IntersectionForm, bound: int = 2):
    """``P`` with ``P^T C P`` diagonal of signs, peeling off vectors of norm +-1; ``None`` if stuck.

    A vector of norm +-1 in a unimodular lattice splits it as an orthogonal sum.
    """
    m = form.m
    C = form.matrix
    v = _unit_vector(form, bound)
    if v is None:
        return None
    phi = [sum(v[i] * C[i][j] for i in range(m)) for j in range(m)]
    U = [list(r) for r in zip(*_row_ops_to_last(phi))]  # phi @ U = e_m
    # columns 0..m-2 of U span v-perp; v completes them to a basis of Z^m
    cols = [[U[i][j] for i in range(m)] for j in range(m - 1)] + [list(v)]
    P = tuple(tuple(cols[j][i] for j in range(m)) for i in range(m))
    if m == 1:
        return P
    rest = make_form(form.n, tuple(r[: m - 1] for r in base_change(form, P).matrix[: m - 1]), force=True)
    Q = unit_splitting(rest, bound)
    if Q is None:
        return None
    block = tuple(tuple(Q[i][j] if i < m - 1 and j < m - 1 else int(i == j) for j in range(m)) for i in range(m))
    return _matmul(P, block)


def integral_basis(form: IntersectionForm):
    """Basis change used for slice computations, or ``None`` to keep the given one.

    The form is first reduced; then an adapted basis is sought, failing which
    definite forms are split into a diagonal of signs.
    """
    if form.m < 2 or is_adapted(form):
        return None
    R = reduced_basis(form)
    reduced = base_change(form, R) if R is not None else form
    if is_adapted(reduced):
        return R
    P = adapted_basis(reduced)
    if P is None and not form.skew and reduced.m <= 6:
        P = unit_splitting(reduced)
    if P is not None:
        return P if R is None else _matmul(R, P)
    return R

"""Homology of the three-term complex 0 -> K(x)U -> A(x)U -> U -> 0.

With ``d(a_i (x) y) = [u_i, y]`` and ``d'([M] (x) y) = sum_{i,j} c_ij a_j (x) [u_i, y]``,
the free loop space homology is the direct sum of

* Q_l = coker(d : A(x)U_{l-1} -> U_l)          in degree l(n-1),
* W_l = ker(d on A(x)U_l) / im(d' from U_{l-1}) in degree n + l(n-1),
* Z_l = ker(d' on K(x)U_l)                       in degree 2n + l(n-1).

Matrices are indexed by word length of the *source*: ``d(l)`` maps A(x)U_l to
U_{l+1} (column ``i*dim U_l + k`` is ``a_i (x) e_k``) and ``dprime(l)`` maps
K(x)U_l to A(x)U_{l+1} (row ``j*dim U_{l+1} + t`` is ``a_j (x) e_t``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import errors, sparse
from .forms import IntersectionForm
from .linalg import FieldEchelon, axpy, invariant_factors_from_diagonal, matmul, rank, smith_invariants
from .rings import CoefficientRing
from .tensor import UAlgebra

SUMMANDS = ("Q", "W", "Z")


class LoopComplex:
    """Lazily built columns of the complex for one form over one ring."""

    def __init__(self, form: IntersectionForm, ring: CoefficientRing | None = None, size_cap: int | None = None, algebra: UAlgebra | None = None):
        self.form = form
        self.ring = ring if ring is not None else form.ring
        self.algebra = algebra if algebra is not None else UAlgebra(form, self.ring, size_cap)
        self.m = form.m
        self._d: dict[int, list] = {}
        self._dp: dict[int, list] = {}
        self._brackets: dict[int, list] = {}
        self._invariants: dict[tuple, tuple] = {}
        self._matrices = None
        if self.ring.tag in ("Z", "Fp"):
            try:
                self._matrices = sparse.BracketMatrices(self.algebra)
            except sparse.Overflow:
                pass

    def _sparse(self, which: str, ell: int):
        """CSR form of ``d`` or ``d'`` when the integer path applies, else ``None``."""
        if self._matrices is None:
            return None
        try:
            return self._matrices.d(ell) if which == "d" else self._matrices.dprime(ell)
        except sparse.Overflow:
            self._matrices = None
            return None

    def dim(self, ell: int) -> int:
        return self.algebra.dim(ell)

    def _bracket_blocks(self, ell: int) -> list:
        blocks = self._brackets.get(ell)
        if blocks is None:
            blocks = [self.algebra.bracket_columns_work(i, ell) for i in range(self.m)]
            self._brackets[ell] = blocks
        return blocks

    def d(self, ell: int) -> list:
        """Columns of d : A(x)U_ell -> U_{ell+1}."""
        cols = self._d.get(ell)
        if cols is None:
            mat = self._sparse("d", ell)
            if mat is not None:
                cols = sparse.to_columns(mat)
            else:
                cols = [col for block in self._bracket_blocks(ell) for col in block]
            self._d[ell] = cols
        return cols

    def dprime(self, ell: int) -> list:
        """Columns of d' : K(x)U_ell -> A(x)U_{ell+1}."""
        cols = self._dp.get(ell)
        if cols is not None:
            return cols
        mat = self._sparse("dp", ell)
        if mat is not None:
            cols = self._dp[ell] = sparse.to_columns(mat)
            return cols
        ring, m = self.ring, self.m
        C = self.algebra.work_form.matrix
        blocks = self._bracket_blocks(ell)
        width = self.dim(ell + 1)
        cols = []
        for k in range(self.dim(ell)):
            col: dict = {}
            for j in range(m):
                acc: dict = {}
                for i in range(m):
                    if C[i][j]:
                        axpy(ring, acc, ring.norm(C[i][j]), blocks[i][k])
                off = j * width
                for t, v in acc.items():
                    col[off + t] = v
            cols.append(col)
        self._dp[ell] = cols
        return cols

    # ranks and invariant factors, cached per map

    def _stats(self, which: str, ell: int):
        key = (which, ell)
        got = self._invariants.get(key)
        if got is None:
            cols = self.d(ell) if which == "d" else self.dprime(ell)
            if self.ring.tag == "Z":
                got = smith_invariants(cols)
            else:
                got = (rank(self.ring, cols), [])
            self._invariants[key] = got
        return got

    def rank_d(self, ell: int) -> int:
        return 0 if ell < 0 else self._stats("d", ell)[0]

    def rank_dprime(self, ell: int) -> int:
        return 0 if ell < 0 else self._stats("dp", ell)[0]

    def torsion_d(self, ell: int) -> list:
        return [] if ell < 0 else self._stats("d", ell)[1]

    def torsion_dprime(self, ell: int) -> list:
        return [] if ell < 0 else self._stats("dp", ell)[1]

    # the three summands

    def q_piece(self, ell: int) -> tuple[int, list]:
        return self.dim(ell) - self.rank_d(ell - 1), self.torsion_d(ell - 1)

    def w_piece(self, ell: int) -> tuple[int, list]:
        kernel = self.m * self.dim(ell) - self.rank_d(ell)
        return kernel - self.rank_dprime(ell - 1), self.torsion_dprime(ell - 1)

    def z_piece(self, ell: int) -> tuple[int, list]:
        return self.dim(ell) - self.rank_dprime(ell), []


# --------------------------------------------------------------------------
# homology of a single middle term


def check_composition(ring: CoefficientRing, d_in: list, d_out: list, where=None) -> None:
    for k, col in enumerate(matmul(ring, d_out, d_in)):
        if col:
            raise errors.CompositionNotZero(
                f"d_out . d_in is nonzero in column {k}" + (f" at word length {where}" if where is not None else ""),
                column=k,
                word_length=where,
            )


def homology_field(d_in: list, d_out: list, ring: CoefficientRing, dim_mid: int | None = None, check: bool = True) -> tuple[int, int, int]:
    """``(dim ker d_out, rank d_in, dim homology)`` at the middle term over a field.

    ``d_in`` has columns in the middle term; ``d_out`` has one column per
    coordinate of the middle term (so ``dim_mid`` defaults to ``len(d_out)``).
    """
    if not ring.is_field:
        raise ValueError("homology_field needs a field")
    if dim_mid is None:
        dim_mid = len(d_out)
    if check and d_in and d_out:
        check_composition(ring, d_in, d_out)
    ker = dim_mid - (rank(ring, d_out) if d_out else 0)
    img = rank(ring, d_in) if d_in else 0
    return ker, img, ker - img


def homology_integer(d_in: list, d_out: list, dim_mid: int | None = None, check: bool = True) -> tuple[int, list[int]]:
    """Free rank and invariant factors of ker(d_out)/im(d_in) over Z.

    ker(d_out) is a saturated sublattice (its quotient embeds in a free module), so
    the torsion of ker/im equals the torsion of coker(d_in), read off from the
    Smith form of ``d_in``.
    """
    from .rings import ZZ

    if dim_mid is None:
        dim_mid = len(d_out)
    if check and d_in and d_out:
        check_composition(ZZ, d_in, d_out)
    r_out = smith_invariants(d_out)[0] if d_out else 0
    r_in, torsion = smith_invariants(d_in) if d_in else (0, [])
    return dim_mid - r_out - r_in, torsion


# --------------------------------------------------------------------------
# graded summary


@dataclass(frozen=True)
class Piece:
    degree: int
    summand: str
    word_length: int
    free_rank: int
    torsion: tuple = ()

    def to_json(self):
        return {
            "degree": self.degree,
            "summand": self.summand,
            "word_length": self.word_length,
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
        }


@dataclass
class GradedModuleSummary:
    n: int
    m: int
    ring: CoefficientRing
    max_degree: int
    pieces: list = field(default_factory=list)

    def totals(self) -> dict:
        """degree -> (free rank, combined invariant factors), every degree up to max."""
        out = {k: [0, []] for k in range(self.max_degree + 1)}
        for p in self.pieces:
            out[p.degree][0] += p.free_rank
            out[p.degree][1].extend(p.torsion)
        return {k: (r, invariant_factors_from_diagonal(t)) for k, (r, t) in out.items()}

    def ranks(self) -> dict:
        return {k: r for k, (r, _) in self.totals().items()}

    def provenance(self) -> dict:
        out: dict = {}
        for p in self.pieces:
            if p.free_rank or p.torsion:
                out.setdefault(p.degree, []).append(p.summand)
        return out

    def piece(self, summand: str, word_length: int) -> Piece | None:
        for p in self.pieces:
            if p.summand == summand and p.word_length == word_length:
                return p
        return None

    def signature(self):
        """Basis-independent content, for invariance comparisons."""
        return tuple((p.degree, p.summand, p.word_length, p.free_rank, tuple(p.torsion)) for p in self.pieces)

    def poincare_series(self) -> str:
        terms = []
        for k, (r, _) in sorted(self.totals().items()):
            if r:
                if k == 0:
                    terms.append(f"{r}")
                else:
                    coef = "" if r == 1 else f"{r}*"
                    terms.append(f"{coef}t^{k}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(t^{self.max_degree + 1})"


def degree_of(summand: str, ell: int, n: int) -> int:
    return {"Q": 0, "W": n, "Z": 2 * n}[summand] + ell * (n - 1)


def word_lengths(summand: str, n: int, max_degree: int) -> range:
    offset = {"Q": 0, "W": n, "Z": 2 * n}[summand]
    if max_degree < offset:
        return range(0)
    return range((max_degree - offset) // (n - 1) + 1)


def max_slice(n: int, max_degree: int) -> int:
    """Largest word length needed to evaluate every summand up to ``max_degree``."""
    top = 0
    for s in SUMMANDS:
        r = word_lengths(s, n, max_degree)
        if len(r):
            top = max(top, r[-1] + (0 if s == "Q" else 1))
    return top


def compute(form: IntersectionForm, ring: CoefficientRing | None = None, max_degree: int = 60, size_cap: int | None = None, complex_: LoopComplex | None = None) -> GradedModuleSummary:
    """Graded Q, W and Z pieces up to total degree ``max_degree``."""
    ring = ring if ring is not None else form.ring
    if max_degree < 0:
        raise errors.ValidationError("max_degree must be nonnegative")
    if form.n < 2:
        raise errors.ExcludedDimension("n must be at least 2 for the degree bookkeeping")
    cx = complex_ if complex_ is not None else LoopComplex(form, ring, size_cap)
    cx.dim(max_slice(form.n, max_degree))  # fail fast on the size cap
    summary = GradedModuleSummary(form.n, form.m, ring, max_degree)
    getters = {"Q": cx.q_piece, "W": cx.w_piece, "Z": cx.z_piece}
    for s in SUMMANDS:
        for ell in word_lengths(s, form.n, max_degree):
            r, tors = getters[s](ell)
            if not ring.is_field:
                if s == "Z" and tors:
                    raise errors.InternalInconsistency(f"Z_{ell} has torsion {tors}")
            summary.pieces.append(Piece(degree_of(s, ell, form.n), s, ell, r, tuple(tors)))
    summary.pieces.sort(key=lambda p: (p.degree, SUMMANDS.index(p.summand)))
    return summary


# --------------------------------------------------------------------------
# consistency checks


@dataclass
class ComplexCheck:
    ell_max: int
    ring: str
    checked: list = field(default_factory=list)  # word lengths whose composite vanished
    max_entry: dict = field(default_factory=dict)  # word length -> largest |entry| in d, d'

    @property
    def ok(self) -> bool:
        return len(self.checked) == self.ell_max + 1

    def to_json(self):
        return {
            "check": "d_after_dprime_zero",
            "ring": self.ring,
            "word_lengths": self.checked,
            "max_entry": {str(k): v for k, v in sorted(self.max_entry.items())},
            "passed": self.ok,
        }


def _size(ring, v) -> int:
    if ring.tag == "Fp":
        return min(v, ring.p - v)
    if isinstance(v, Fraction):
        return max(abs(v.numerator), v.denominator)
    return abs(v)


def _max_abs(ring, cols) -> int:
    if ring.tag == "Z":
        return max((max(map(abs, col.values())) for col in cols if col), default=0)
    return max((_size(ring, v) for col in cols for v in col.values()), default=0)


def _sparse_max(ring, mat) -> int:
    if not mat.nnz:
        return 0
    data = mat.data
    if ring.tag == "Fp":
        data = np.minimum(data, ring.p - data)
    return int(abs(data).max())


def verify_complex(form: IntersectionForm, ell_max: int, ring: CoefficientRing | None = None, complex_: LoopComplex | None = None) -> ComplexCheck:
    """Check ``d(l+1) . d'(l) == 0`` for every ``l <= ell_max``."""
    ring = ring if ring is not None else form.ring
    cx = complex_ if complex_ is not None else LoopComplex(form, ring)
    rec = ComplexCheck(ell_max, ring.label())
    for ell in range(ell_max + 1):
        dp, dd = cx._sparse("dp", ell), cx._sparse("d", ell + 1)
        composite = None
        if dp is not None and dd is not None:
            try:
                composite = sparse.product(ring, dd, dp)
            except sparse.Overflow:
                composite = None
        if composite is not None:
            if composite.nnz:
                col = int(np.flatnonzero(np.diff(composite.tocsc().indptr))[0])
                raise errors.CompositionNotZero(f"d_out . d_in is nonzero in column {col} at word length {ell}", column=col, word_length=ell)
            rec.max_entry[ell] = max(_sparse_max(ring, dp), _sparse_max(ring, dd))
        else:
            dp, dd = cx.dprime(ell), cx.d(ell + 1)
            check_composition(ring, dp, dd, where=ell)
            rec.max_entry[ell] = max(_max_abs(ring, dp), _max_abs(ring, dd))
        rec.checked.append(ell)
    return rec


# --------------------------------------------------------------------------
# explicit bases over a field (used for the BV tables)


def cokernel_basis(ring: CoefficientRing, cols: list, dim: int) -> list[int]:
    """Coordinates whose unit vectors give a basis of coker; pivots are the largest indices."""
    ech = FieldEchelon(ring)
    for col in cols:
        ech.add(col)
    return [k for k in range(dim) if k not in ech.pivots]


def homology_basis(ring: CoefficientRing, d_in: list, d_out: list, dim_mid: int) -> list[dict]:
    """Representatives of a basis of ker(d_out)/im(d_in) over a field.

    Kernel vectors come from the zero reductions of the columns of ``d_out``
    processed in order; a kernel vector is kept when it is independent of the
    image and of the representatives chosen before it.
    """
    ech = FieldEchelon(ring, track=True)
    for k in range(dim_mid):
        ech.add(d_out[k] if d_out else {})
    span = FieldEchelon(ring)
    for col in d_in:
        span.add(col)
    reps = []
    for vec in ech.kernel:
        if span.add(vec) is not None:
            reps.append(vec)
    return reps

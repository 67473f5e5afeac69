"""Integer sparse matrices for the bracket maps over Z and F_p.

The left multiplication maps satisfy the recursion

    L_j(l) = P(l+1) . (L_j(l-1) (x) I_m) . S(l)

with ``P`` the slice projections and ``S`` the sections, so all bracket matrices
come out of a few sparse products.  Products run in int64; each one is preceded
by a float bound on ``|A| |B|`` and refused (``Overflow``) when exactness could be
lost, in which case callers fall back to the dictionary code.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .rings import CoefficientRing

EXACT_BOUND = 2.0**52


class Overflow(ArithmeticError):
    pass


def from_columns(cols: list, nrows: int) -> sp.csr_matrix:
    indptr = [0]
    indices: list = []
    data: list = []
    for col in cols:
        indices.extend(col.keys())
        data.extend(col.values())
        indptr.append(len(indices))
    try:
        values = np.array(data, dtype=np.int64)
    except OverflowError as exc:
        raise Overflow("entry exceeds int64") from exc
    mat = sp.csc_matrix((values, np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)), shape=(nrows, len(cols)))
    return mat.tocsr()


def to_columns(mat) -> list:
    csc = sp.csc_matrix(mat)
    csc.sum_duplicates()
    ptr, idx, val = csc.indptr, csc.indices.tolist(), csc.data.tolist()
    return [{i: v for i, v in zip(idx[ptr[k] : ptr[k + 1]], val[ptr[k] : ptr[k + 1]]) if v} for k in range(csc.shape[1])]


def max_abs(mat) -> int:
    return int(np.abs(mat.data).max()) if mat.nnz else 0


def _normalize(ring: CoefficientRing, mat):
    if ring.tag == "Fp":
        mat.data %= ring.p
    mat.eliminate_zeros()
    return mat


def product(ring: CoefficientRing, a, b):
    """Exact ``a @ b`` over Z or F_p."""
    if a.nnz and b.nnz:
        bound = abs(a).astype(np.float64) @ abs(b).astype(np.float64)
        if bound.nnz and bound.data.max() >= EXACT_BOUND:
            raise Overflow("sparse product may exceed the exact int64 range")
    return _normalize(ring, (a @ b).tocsr())


def linear(ring: CoefficientRing, terms):
    """Exact ``sum c * M`` over ``(c, M)`` pairs (all of one shape)."""
    out = None
    for c, mat in terms:
        if not c:
            continue
        if max_abs(mat) * abs(c) * 4 >= EXACT_BOUND:
            raise Overflow("linear combination may exceed the exact int64 range")
        part = mat * int(c)
        out = part if out is None else out + part
    return None if out is None else _normalize(ring, out.tocsr())


class BracketMatrices:
    """``[u'_j, -]`` on every slice of a :class:`~loophom.tensor.UAlgebra`, as CSR matrices."""

    def __init__(self, algebra):
        if algebra.ring.tag not in ("Z", "Fp"):
            raise ValueError("integer sparse path needs Z or F_p")
        if algebra.ring.tag == "Fp" and algebra.ring.p >= 2**24:
            raise Overflow("prime too large for the int64 path")
        self.algebra = algebra
        self.ring = algebra.ring
        self.m = algebra.m
        self._proj: dict[int, sp.csr_matrix] = {}
        self._section: dict[int, sp.csr_matrix] = {}
        self._left: dict[tuple, sp.csr_matrix] = {}
        self._bracket: dict[tuple, sp.csr_matrix] = {}

    def proj(self, ell: int):
        mat = self._proj.get(ell)
        if mat is None:
            s = self.algebra.slice(ell)
            mat = from_columns(s.proj, s.dim)
            self._proj[ell] = mat
        return mat

    def section(self, ell: int):
        mat = self._section.get(ell)
        if mat is None:
            s = self.algebra.slice(ell)
            mat = from_columns(s.section, self.algebra.dim(ell - 1) * self.m)
            self._section[ell] = mat
        return mat

    def left(self, j: int, ell: int):
        key = (j, ell)
        mat = self._left.get(key)
        if mat is None:
            if ell == 0:
                mat = self.proj(1)[:, [j]].tocsr()
            else:
                lifted = sp.kron(self.left(j, ell - 1), sp.identity(self.m, dtype=np.int64, format="csr"), format="csr")
                mat = product(self.ring, self.proj(ell + 1), product(self.ring, lifted, self.section(ell)))
            self._left[key] = mat
        return mat

    def right(self, j: int, ell: int):
        return self.proj(ell + 1)[:, j :: self.m].tocsr()

    def bracket(self, j: int, ell: int):
        key = (j, ell)
        mat = self._bracket.get(key)
        if mat is None:
            s = self.algebra.bracket_sign(ell)
            mat = linear(self.ring, [(1, self.left(j, ell)), (-s, self.right(j, ell))])
            if mat is None:
                mat = sp.csr_matrix((self.algebra.dim(ell + 1), self.algebra.dim(ell)), dtype=np.int64)
            self._bracket[key] = mat
        return mat

    def d(self, ell: int):
        return sp.hstack([self.bracket(i, ell) for i in range(self.m)], format="csr")

    def dprime(self, ell: int):
        C = self.algebra.work_form.matrix
        blocks = []
        for j in range(self.m):
            block = linear(self.ring, [(C[i][j], self.bracket(i, ell)) for i in range(self.m)])
            if block is None:
                block = sp.csr_matrix((self.algebra.dim(ell + 1), self.algebra.dim(ell)), dtype=np.int64)
            blocks.append(block)
        return sp.vstack(blocks, format="csr")

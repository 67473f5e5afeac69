"""Exact sparse linear algebra over Z, Q and F_p.

Sparse vectors are ``dict[int, coefficient]`` with zero entries never stored.
Sparse matrices are lists of column vectors together with a row count.
"""

from __future__ import annotations

from math import gcd

from .rings import CoefficientRing, ZZ


def axpy(ring: CoefficientRing, y: dict, a, x: dict) -> None:
    """In place ``y += a * x``."""
    if ring.tag == "Fp":
        p = ring.p
        for k, v in x.items():
            t = (y.get(k, 0) + a * v) % p
            if t:
                y[k] = t
            else:
                y.pop(k, None)
    elif ring.tag == "Z":
        for k, v in x.items():
            t = y.get(k, 0) + a * v
            if t:
                y[k] = t
            else:
                y.pop(k, None)
    else:
        norm = ring.norm
        for k, v in x.items():
            t = y.get(k, 0) + a * v
            if t:
                y[k] = norm(t)
            else:
                y.pop(k, None)


def scale(ring: CoefficientRing, a, x: dict) -> dict:
    if a == 0:
        return {}
    norm = ring.norm
    out = {}
    for k, v in x.items():
        t = norm(a * v)
        if t:
            out[k] = t
    return out


def combine(ring: CoefficientRing, terms) -> dict:
    """Sum of ``coef * vec`` over an iterable of ``(coef, vec)`` pairs."""
    out: dict = {}
    for a, x in terms:
        if a:
            axpy(ring, out, a, x)
    return out


def content(vec: dict) -> int:
    g = 0
    for v in vec.values():
        g = gcd(g, v)
        if g == 1:
            break
    return g


def matmul(ring: CoefficientRing, left_cols: list, right_cols: list) -> list:
    """Columns of ``L @ R`` where both are given as column lists."""
    return [combine(ring, ((c, left_cols[k]) for k, c in col.items())) for col in right_cols]


def to_dense(cols: list, nrows: int) -> list:
    rows = [[0] * len(cols) for _ in range(nrows)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            rows[i][j] = v
    return rows


def from_dense(rows: list) -> tuple[list, int]:
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    cols = [{i: rows[i][j] for i in range(nrows) if rows[i][j]} for j in range(ncols)]
    return cols, nrows


def bareiss_det(rows: list) -> int:
    """Exact determinant of a square integer matrix by fraction-free elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


# --------------------------------------------------------------------------
# semi-echelon forms over a field (pivot = largest index)


class FieldEchelon:
    """Incremental semi-echelon basis of a subspace of R^N over a field.

    Each stored vector is normalised to coefficient 1 at its pivot, which is its
    largest index.  ``track`` records, for every inserted vector, the combination
    of inserted vectors it was reduced to; zero reductions yield kernel vectors.
    """

    def __init__(self, ring: CoefficientRing, track: bool = False):
        if not ring.is_field:
            raise ValueError("FieldEchelon needs a field")
        self.ring = ring
        self.pivots: dict[int, dict] = {}
        self.track = track
        self.history: dict[int, dict] = {}
        self.kernel: list[dict] = []
        self._count = 0

    def reduce(self, vec: dict, hist: dict | None = None):
        ring = self.ring
        vec = {k: v for k, v in ((k, ring.norm(v)) for k, v in vec.items()) if v}
        pivots = self.pivots
        while vec:
            r = max(vec)
            piv = pivots.get(r)
            if piv is None:
                break
            a = vec[r]
            axpy(ring, vec, -a, piv)
            if hist is not None:
                axpy(ring, hist, -a, self.history[r])
        return vec, hist

    def add(self, vec: dict):
        """Insert ``vec``; return its pivot index or ``None`` if dependent."""
        idx = self._count
        self._count += 1
        hist = {idx: 1} if self.track else None
        vec, hist = self.reduce(vec, hist)
        if not vec:
            if self.track:
                self.kernel.append(hist)
            return None
        r = max(vec)
        inv = self.ring.inv(vec[r])
        if inv != 1:
            vec = scale(self.ring, inv, vec)
            if hist is not None:
                hist = scale(self.ring, inv, hist)
        self.pivots[r] = vec
        if self.track:
            self.history[r] = hist
        return r

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]


def _rank_integer(cols: list) -> int:
    """Rank over Q of an integer matrix by fraction-free top reduction."""
    pivots: dict[int, dict] = {}
    for col in cols:
        vec = dict(col)
        while vec:
            r = max(vec)
            piv = pivots.get(r)
            if piv is None:
                g = content(vec)
                if g > 1:
                    vec = {k: v // g for k, v in vec.items()}
                pivots[r] = vec
                break
            a, b = vec[r], piv[r]
            g = gcd(a, b)
            fa, fb = b // g, a // g
            new = {}
            for k, v in vec.items():
                new[k] = v * fa
            for k, v in piv.items():
                t = new.get(k, 0) - fb * v
                if t:
                    new[k] = t
                else:
                    new.pop(k, None)
            g = content(new)
            if g > 1:
                new = {k: v // g for k, v in new.items()}
            vec = new
    return len(pivots)


def rank(ring: CoefficientRing, cols: list) -> int:
    """Exact rank; over Z this is the rank over Q."""
    if ring.tag == "Z":
        return _rank_integer(cols)
    ech = FieldEchelon(ring)
    for col in cols:
        ech.add(col)
    return ech.rank


def nullity(ring: CoefficientRing, cols: list) -> int:
    return len(cols) - rank(ring, cols)


# --------------------------------------------------------------------------
# Smith normal form over Z


def invariant_factors_from_diagonal(diag) -> list[int]:
    """Divisibility-ordered invariant factors (> 1) of a diagonal matrix."""
    d = sorted(abs(x) for x in diag if abs(x) > 1)
    n = len(d)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = d[i], d[j]
            g = gcd(a, b)
            if g != a:
                d[i], d[j] = g, a * b // g
    return [x for x in d if x > 1]


def smith_invariants(cols: list, nrows: int | None = None) -> tuple[int, list[int]]:
    """Rank and nontrivial invariant factors of a sparse integer matrix.

    Unit pivots are eliminated first (cheap and fill-in free in the typical
    case); the remainder is diagonalised by smallest-entry pivoting with
    Euclidean column and row reductions.
    """
    cols = {j: dict(c) for j, c in enumerate(cols) if c}
    rows: dict[int, set] = {}
    for j, c in cols.items():
        for i in c:
            rows.setdefault(i, set()).add(j)
    diag: list[int] = []

    def drop_column(j):
        for i in cols.pop(j):
            s = rows[i]
            s.discard(j)
            if not s:
                del rows[i]

    def col_op(j, q, c):
        """col_j -= q * col_c (keeping the row index current)."""
        cj = cols[j]
        for i, v in c.items():
            t = cj.get(i, 0) - q * v
            if t:
                if i not in cj:
                    rows.setdefault(i, set()).add(j)
                cj[i] = t
            else:
                if i in cj:
                    del cj[i]
                    s = rows[i]
                    s.discard(j)
                    if not s:
                        del rows[i]
        if not cj:
            del cols[j]

    # unit pivots
    progress = True
    while progress:
        progress = False
        for j in sorted(cols, key=lambda k: (len(cols[k]), k)):
            c = cols.get(j)
            if c is None:
                continue
            best = None
            for i, v in c.items():
                if v == 1 or v == -1:
                    cnt = len(rows[i])
                    if best is None or cnt < best[0]:
                        best = (cnt, i)
            if best is None:
                continue
            i = best[1]
            u = c[i]
            for k in sorted(rows[i] - {j}):
                col_op(k, cols[k][i] * u, c)
            drop_column(j)
            diag.append(1)
            progress = True

    # general pivots: Euclidean reduction on the smallest entry
    while cols:
        _, i, j = min((abs(v), i, j) for j, c in cols.items() for i, v in c.items())
        while True:
            c = cols[j]
            piv = c[i]
            for k in sorted(rows[i] - {j}):
                col_op(k, cols[k][i] // piv, c)
            rest = [(abs(cols[k][i]), k) for k in rows[i] if k != j]
            if rest:
                j = min(rest)[1]
                continue
            # row i is now clear outside column j; row operations touch column j only
            for k in sorted(set(c) - {i}):
                t = c[k] % piv
                if t:
                    c[k] = t
                else:
                    del c[k]
                    s = rows[k]
                    s.discard(j)
                    if not s:
                        del rows[k]
            rest = [(abs(v), k) for k, v in c.items() if k != i]
            if rest:
                i = min(rest)[1]
                continue
            diag.append(piv)
            drop_column(j)
            break
    return len(diag), invariant_factors_from_diagonal(diag)


def smith_dense_left(rows: list) -> tuple[list, list[int]]:
    """Dense Smith reduction returning ``(S, diag)`` with ``S @ M @ T`` diagonal.

    ``S`` is unimodular; ``diag`` lists the diagonal entries in pivot order (not
    necessarily in divisibility order).  Intended for small residual blocks.
    """
    a = [list(r) for r in rows]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    S = [[int(i == j) for j in range(nr)] for i in range(nr)]
    diag = []
    t = 0
    while t < min(nr, nc):
        entries = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        a[t], a[pi] = a[pi], a[t]
        S[t], S[pi] = S[pi], S[t]
        for r in a:
            r[t], r[pj] = r[pj], r[t]
        while True:
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                q = a[i][t] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    S[i] = [x - q * y for x, y in zip(S[i], S[t])]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, nc):
                q = a[t][j] // piv
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    dirty = True
            if not dirty:
                break
            entries = [(abs(a[i][t]), i, t) for i in range(t + 1, nr) if a[i][t]]
            entries += [(abs(a[t][j]), t, j) for j in range(t + 1, nc) if a[t][j]]
            _, pi, pj = min(entries)
            a[t], a[pi] = a[pi], a[t]
            S[t], S[pi] = S[pi], S[t]
            for r in a:
                r[t], r[pj] = r[pj], r[t]
        diag.append(a[t][t])
        t += 1
    return S, diag


def inverse_unimodular(S: list) -> list:
    """Exact inverse of a unimodular integer matrix (Gauss-Jordan over Q)."""
    from fractions import Fraction

    n = len(S)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(S)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    out = [[x for x in row[n:]] for row in a]
    for row in out:
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]

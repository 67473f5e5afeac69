"""The quadratic algebra U = T(V)/(chi), built one word length at a time.

``V`` has generators ``u_0, ..., u_{m-1}`` (printed 1-based), all of degree n-1.
A word of length l is a tuple of letters; ambient coordinates of V^{(x)l} are
words in lexicographic order, i.e. the base-m number with the first letter most
significant.

Slices are built incrementally.  Because the ideal satisfies
I_l = I_{l-1} (x) V + V^{(x)(l-2)} (x) chi, the slice is the quotient

    U_l = (U_{l-1} (x) V) / span{ z (x) chi : z a basis element of U_{l-2} },

so each step eliminates d_{l-2} relations in m*d_{l-1} "pair" coordinates
(basis element of U_{l-1}, letter) instead of working in all m^l words.  Over a
field, pivots are taken at the lexicographically largest pair, which makes the
surviving basis exactly the lexicographically earliest non-pivot words of the
full ambient elimination.  Over Z pivots must be units; relations without a unit
entry are finished by a small dense Smith reduction, in which case some basis
elements are integral combinations of words rather than single words.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from . import errors
from .forms import IntersectionForm, base_change, integral_basis
from .linalg import axpy, smith_dense_left, inverse_unimodular, invariant_factors_from_diagonal
from .rings import CoefficientRing

DEFAULT_SIZE_CAP = 5_000_000


def size_cap_from_env(default: int = DEFAULT_SIZE_CAP) -> int:
    raw = os.environ.get("LOOPHOM_SIZE_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return default


def word_str(word) -> str:
    if not word:
        return "1"
    out = []
    for letter, run in itertools.groupby(word):
        k = len(list(run))
        out.append(f"u{letter + 1}" + (f"^{k}" if k > 1 else ""))
    return "".join(out)


def word_index(word, m: int) -> int:
    idx = 0
    for a in word:
        idx = idx * m + a
    return idx


def index_word(idx: int, m: int, ell: int) -> tuple:
    out = []
    for _ in range(ell):
        idx, a = divmod(idx, m)
        out.append(a)
    return tuple(reversed(out))


# --------------------------------------------------------------------------
# the relation


@dataclass(frozen=True)
class ChiElement:
    m: int
    coefficients: dict  # (i, j) -> int, 0-based letters

    def vector(self) -> dict:
        return {i * self.m + j: c for (i, j), c in self.coefficients.items() if c}

    def items(self):
        return sorted((k, c) for k, c in self.coefficients.items() if c)


def chi(form: IntersectionForm) -> ChiElement:
    """The quadratic relation sum_{i<j} c_ij [u_i, u_j] + sum_i c_ii u_i^2."""
    m = form.m
    flip = -1 if (form.n - 1) % 2 == 0 else 1  # [x, y] = xy - (-1)^{(n-1)^2} yx
    coef: dict = {}
    for i in range(m):
        if form.c(i, i):
            coef[(i, i)] = coef.get((i, i), 0) + form.c(i, i)
        for j in range(i + 1, m):
            c = form.c(i, j)
            if c:
                coef[(i, j)] = coef.get((i, j), 0) + c
                coef[(j, i)] = coef.get((j, i), 0) + flip * c
    return ChiElement(m, {k: v for k, v in coef.items() if v})


def ideal_slice(rel: ChiElement, ell: int, cap: int | None = None) -> list:
    """Columns ``w_left * chi * w_right`` spanning I_ell inside V^{(x)ell}.

    Split position major, then lexicographic on ``(w_left, w_right)``.  Returned as
    a list of sparse columns over ambient word indices (m^ell rows).
    """
    if ell < 2:
        raise ValueError("ideal slices start at word length 2")
    m = rel.m
    cap = size_cap_from_env() if cap is None else cap
    if m**ell > cap:
        raise errors.SizeCapExceeded(f"ambient dimension {m}^{ell} exceeds cap {cap}", m=m, ell=ell, cap=cap)
    items = rel.items()
    cols = []
    for a in range(ell - 1):
        b = ell - 2 - a
        for left in range(m**a):
            for right in range(m**b):
                col = {}
                for (i, j), c in items:
                    idx = ((left * m + i) * m + j) * m**b + right
                    col[idx] = col.get(idx, 0) + c
                cols.append({k: v for k, v in col.items() if v})
    return cols


# --------------------------------------------------------------------------
# fully reduced echelon with a pivot rule


class _Reducer:
    """Fully reduced echelon form of relation vectors.

    Every stored vector has coefficient 1 at its pivot and no entries at other
    pivots.  The pivot of a new vector is its largest index whose coefficient is
    a unit (over a field: its largest index).
    """

    def __init__(self, ring: CoefficientRing):
        self.ring = ring
        self.rows: dict[int, dict] = {}
        self.occ: dict[int, set] = {}
        self.deferred: list[dict] = []

    def reduce(self, vec: dict) -> dict:
        rows = self.rows
        hits = [k for k in vec if k in rows]
        for k in hits:
            a = vec.get(k)
            if a:
                axpy(self.ring, vec, -a, rows[k])
        return vec

    def insert(self, vec: dict) -> bool:
        vec = self.reduce(dict(vec))
        if not vec:
            return True
        ring = self.ring
        p = None
        for k in sorted(vec, reverse=True):
            if ring.is_unit(vec[k]):
                p = k
                break
        if p is None:
            self.deferred.append(vec)
            return False
        inv = ring.inv(vec[p])
        if inv != 1:
            vec = {k: ring.norm(v * inv) for k, v in vec.items()}
        # back-substitute the new pivot into stored rows
        for q in sorted(self.occ.pop(p, ())):
            row = self.rows[q]
            a = row.get(p)
            if not a:
                continue
            before = set(row)
            axpy(ring, row, -a, vec)
            for k in set(row) - before:
                self.occ.setdefault(k, set()).add(q)
            for k in before - set(row):
                if k != p:
                    s = self.occ.get(k)
                    if s is not None:
                        s.discard(q)
        self.rows[p] = vec
        for k in vec:
            if k != p:
                self.occ.setdefault(k, set()).add(p)
        return True

    def retry_deferred(self):
        progress = True
        while progress and self.deferred:
            progress = False
            pending, self.deferred = self.deferred, []
            for vec in pending:
                before = len(self.deferred)
                self.insert(vec)
                if len(self.deferred) == before:
                    progress = True
        self.deferred = [v for v in (self.reduce(dict(v)) for v in self.deferred) if v]


# --------------------------------------------------------------------------
# slices


class USlice:
    """Word-length ``ell`` piece of U over one coefficient ring.

    ``proj[t]`` gives the U_ell coordinates of pair ``t = k*m + b`` (basis element
    ``k`` of U_{ell-1} followed by letter ``b``); ``section[k]`` lifts basis element
    ``k`` back to pair coordinates, so ``proj`` after ``section`` is the identity.
    """

    def __init__(self, algebra: "UAlgebra", ell: int, dim: int, proj: list, section: list, words: list, invariant_factors=(), relation_rank: int = 0):
        self.algebra = algebra
        self.ell = ell
        self.dim = dim
        self.proj = proj
        self.section = section
        self.words = words
        self.invariant_factors = list(invariant_factors)
        self.relation_rank = relation_rank

    @property
    def ambient_dim(self) -> int:
        return self.algebra.m**self.ell

    @property
    def basis(self) -> list:
        return [self.label(k) for k in range(self.dim)]

    @property
    def word_basis(self) -> bool:
        return all(w is not None for w in self.words)

    def label(self, k: int) -> str:
        w = self.words[k]
        if w is None:
            return f"b{self.ell}.{k + 1}"
        text = word_str(w)
        return text.replace("u", "u'") if self.algebra.change is not None else text

    def reduce_word(self, t) -> dict:
        """U coordinates of an ambient vector (dict or dense list over words)."""
        return self.algebra.reduce_ambient(t, self.ell)

    def lift(self, x: dict) -> dict:
        """An ambient representative ``{word: coef}`` of coordinates ``x``."""
        return self.algebra.lift(x, self.ell)


class UAlgebra:
    """Cache of slices of U = T(V)/(chi) for a fixed form and ring."""

    def __init__(self, form: IntersectionForm, ring: CoefficientRing | None = None, size_cap: int | None = None, strict: bool = True, adapt: bool = True):
        self.form = form
        self.ring = ring if ring is not None else form.ring
        self.m = form.m
        self.chi = chi(form)
        self.size_cap = size_cap_from_env() if size_cap is None else size_cap
        self.strict = strict
        # Slices are built on work generators u' (u = P u') in which the relation
        # is short and, over Z, has unit pivots; the public maps speak the original u.
        self.change = integral_basis(form) if adapt else None
        if self.change is not None:
            self.work_form = base_change(form, self.change)
            self._change_inv = inverse_unimodular([list(r) for r in self.change])
        else:
            self.work_form = form
        self.work_chi = chi(self.work_form)
        self._slices: dict[int, USlice] = {}
        self._left: dict[tuple, list] = {}
        self._chi_items = [(i, j, self.ring.norm(c)) for (i, j), c in self.work_chi.items()]
        self._chi_items = [t for t in self._chi_items if t[2]]

    # -- construction --------------------------------------------------

    def slice(self, ell: int) -> USlice:
        s = self._slices.get(ell)
        if s is not None:
            return s
        if ell < 0:
            raise ValueError("word length must be nonnegative")
        if self.m**ell > self.size_cap:
            raise errors.SizeCapExceeded(
                f"ambient dimension {self.m}^{ell} exceeds cap {self.size_cap}", m=self.m, ell=ell, cap=self.size_cap
            )
        for k in range(ell + 1):
            if k not in self._slices:
                self._slices[k] = self._build(k)
        return self._slices[ell]

    def dim(self, ell: int) -> int:
        return self.slice(ell).dim

    def _build(self, ell: int) -> USlice:
        m, ring = self.m, self.ring
        if ell == 0:
            return USlice(self, 0, 1, [], [{}], [()])
        prev = self._slices[ell - 1]
        npairs = prev.dim * m
        if ell == 1:
            proj = [{b: 1} for b in range(m)]
            words = [(b,) if self.change is None else None for b in range(m)]
            return USlice(self, 1, m, proj, [{b: 1} for b in range(m)], words)

        prev2 = self._slices[ell - 2]
        red = _Reducer(ring)
        chi_items = self._chi_items
        for z in range(prev2.dim):
            vec: dict = {}
            for i, j, c in chi_items:
                for y, v in prev.proj[z * m + i].items():
                    key = y * m + j
                    t = vec.get(key, 0) + c * v
                    if ring.tag == "Fp":
                        t %= ring.p
                    elif ring.tag == "Q":
                        t = ring.norm(t)
                    if t:
                        vec[key] = t
                    else:
                        vec.pop(key, None)
            if vec:
                red.insert(vec)
        red.retry_deferred()

        pivots = red.rows
        residual_rows: list[int] = []
        S = Sinv = None
        diag: list[int] = []
        if red.deferred:
            residual_rows = sorted({k for v in red.deferred for k in v})
            pos = {r: a for a, r in enumerate(residual_rows)}
            dense = [[0] * len(red.deferred) for _ in residual_rows]
            for j, v in enumerate(red.deferred):
                for k, c in v.items():
                    dense[pos[k]][j] = c
            S, diag = smith_dense_left(dense)
            Sinv = inverse_unimodular(S)
        torsion = invariant_factors_from_diagonal(diag)
        if torsion and self.strict:
            raise errors.TorsionInU(
                f"U_{ell} has torsion over Z (invariant factors {torsion}); the integral quotient must be free",
                ell=ell,
                invariant_factors=torsion,
            )
        r = sum(1 for d in diag if d)

        residual_set = set(residual_rows)
        free_positions = [t for t in range(npairs) if t not in pivots and t not in residual_set]
        coord: dict[int, int] = {t: a for a, t in enumerate(free_positions)}
        nres = len(residual_rows) - r
        dim = len(free_positions) + nres

        proj: list = [None] * npairs
        for t, a in coord.items():
            proj[t] = {a: 1}
        base = len(free_positions)
        for k, row_pos in enumerate(residual_rows):
            proj[row_pos] = {base + (q - r): S[q][k] for q in range(r, len(residual_rows)) if S[q][k]}
        for p in sorted(pivots):
            acc: dict = {}
            for q, c in pivots[p].items():
                if q != p:
                    axpy(ring, acc, -c, proj[q])
            proj[p] = acc

        section = [{t: 1} for t in free_positions]
        words = []
        for t in free_positions:
            y, b = divmod(t, m)
            w = prev.words[y]
            words.append(None if w is None else w + (b,))
        for q in range(r, len(residual_rows)):
            section.append({residual_rows[k]: Sinv[k][q] for k in range(len(residual_rows)) if Sinv[k][q]})
            words.append(None)
        return USlice(self, ell, dim, proj, section, words, torsion, len(pivots) + r)

    # -- maps ----------------------------------------------------------
    # ``*_work`` methods use the generators the slices are built on; the public
    # versions take original generator indices.

    def right_work(self, j: int, ell: int) -> list:
        """Columns of right multiplication by u'_j, U_ell -> U_{ell+1}."""
        nxt = self.slice(ell + 1)
        m = self.m
        return [nxt.proj[k * m + j] for k in range(self.dim(ell))]

    def left_work(self, j: int, ell: int) -> list:
        """Columns of left multiplication by u'_j, U_ell -> U_{ell+1}."""
        key = (j, ell)
        cols = self._left.get(key)
        if cols is not None:
            return cols
        nxt = self.slice(ell + 1)
        m, ring = self.m, self.ring
        if ell == 0:
            cols = [dict(nxt.proj[j])]
        else:
            below = self.left_work(j, ell - 1)
            cur = self.slice(ell)
            cols = []
            for k in range(cur.dim):
                acc: dict = {}
                for t, c in cur.section[k].items():
                    y, b = divmod(t, m)
                    for z, v in below[y].items():
                        axpy(ring, acc, c * v, nxt.proj[z * m + b])
                cols.append(acc)
        self._left[key] = cols
        return cols

    def _original(self, work_method, i: int, ell: int) -> list:
        if self.change is None:
            return work_method(i, ell)
        parts = [(self.change[i][j], work_method(j, ell)) for j in range(self.m) if self.change[i][j]]
        out = []
        for k in range(self.dim(ell)):
            acc: dict = {}
            for c, cols in parts:
                axpy(self.ring, acc, c, cols[k])
            out.append(acc)
        return out

    def right(self, i: int, ell: int) -> list:
        """Columns of right multiplication by u_i, U_ell -> U_{ell+1}."""
        return self._original(self.right_work, i, ell)

    def left(self, i: int, ell: int) -> list:
        """Columns of left multiplication by u_i, U_ell -> U_{ell+1}."""
        return self._original(self.left_work, i, ell)

    def bracket_sign(self, ell: int) -> int:
        """(-1)^{|u_i| |y|} for y of word length ell."""
        return -1 if ((self.form.n - 1) * ell) % 2 else 1

    def bracket_columns_work(self, j: int, ell: int) -> list:
        """Columns of y -> [u'_j, y] on U_ell."""
        s = self.bracket_sign(ell)
        out = []
        for lc, rc in zip(self.left_work(j, ell), self.right_work(j, ell)):
            acc = dict(lc)
            axpy(self.ring, acc, -s, rc)
            out.append(acc)
        return out

    def bracket_columns(self, i: int, ell: int) -> list:
        """Columns of y -> [u_i, y] on U_ell."""
        return self._original(self.bracket_columns_work, i, ell)

    def bracket_left(self, i: int, y: dict, ell: int) -> dict:
        """[u_i, y] for y given in U_ell coordinates."""
        if any(k < 0 or k >= self.dim(ell) for k in y):
            raise errors.DimensionMismatch(f"coordinate out of range for U_{ell}")
        cols = self.bracket_columns(i, ell)
        acc: dict = {}
        for k, c in y.items():
            axpy(self.ring, acc, c, cols[k])
        return acc

    # -- ambient <-> U -------------------------------------------------

    def reduce_word_tuple(self, word) -> dict:
        """U coordinates of a word in the original generators."""
        vec = {0: 1}
        m, ring = self.m, self.ring
        for ell, a in enumerate(word, start=1):
            s = self.slice(ell)
            letters = [(1, a)] if self.change is None else [(c, j) for j, c in enumerate(self.change[a]) if c]
            acc: dict = {}
            for y, c in vec.items():
                for coef, b in letters:
                    axpy(ring, acc, c * coef, s.proj[y * m + b])
            vec = acc
        return vec

    def reduce_ambient(self, t, ell: int) -> dict:
        m = self.m
        if isinstance(t, dict):
            items = t.items()
        else:
            if len(t) != m**ell:
                raise errors.DimensionMismatch(f"ambient vector must have length {m**ell}")
            items = ((k, v) for k, v in enumerate(t) if v)
        acc: dict = {}
        for key, c in items:
            word = tuple(key) if isinstance(key, tuple) else index_word(key, m, ell)
            if len(word) != ell:
                raise errors.DimensionMismatch(f"word {word} does not have length {ell}")
            axpy(self.ring, acc, self.ring.norm(c), self.reduce_word_tuple(word))
        return acc

    def _lift_work(self, x: dict, ell: int) -> dict:
        m, ring = self.m, self.ring
        if ell == 0:
            return {(): x.get(0, 0)} if x.get(0, 0) else {}
        s = self.slice(ell)
        pairs: dict = {}
        for k, c in x.items():
            axpy(ring, pairs, c, s.section[k])
        below: dict = {}
        for t, c in pairs.items():
            y, b = divmod(t, m)
            below.setdefault(b, {})[y] = c
        out: dict = {}
        for b in sorted(below):
            for w, c in self._lift_work(below[b], ell - 1).items():
                key = w + (b,)
                v = ring.norm(out.get(key, 0) + c)
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return out

    def lift(self, x: dict, ell: int) -> dict:
        """Ambient representative of U_ell coordinates, as ``{word: coef}`` in the u_i."""
        work = self._lift_work(x, ell)
        if self.change is None:
            return work
        ring, inv = self.ring, self._change_inv
        out: dict = {}
        for w, c in work.items():
            terms = {(): c}
            for j in w:
                nxt: dict = {}
                for prefix, v in terms.items():
                    for a in range(self.m):
                        if inv[j][a]:
                            key = prefix + (a,)
                            nxt[key] = nxt.get(key, 0) + v * inv[j][a]
                terms = nxt
            for key, v in terms.items():
                t = ring.norm(out.get(key, 0) + v)
                if t:
                    out[key] = t
                else:
                    out.pop(key, None)
        return out


def u_slice(form: IntersectionForm, ell: int, ring: CoefficientRing | None = None, size_cap: int | None = None) -> USlice:
    """Slice ``ell`` with words in the given generators (over Z possibly in adapted ones).

    Convenience wrapper building a fresh algebra; prefer ``UAlgebra`` for reuse.
    """
    ring = form.ring if ring is None else ring
    return UAlgebra(form, ring, size_cap, adapt=ring.tag == "Z").slice(ell)


def bracket_left(form: IntersectionForm, i: int, y: dict, ell: int, ring: CoefficientRing | None = None) -> dict:
    ring = form.ring if ring is None else ring
    return UAlgebra(form, ring, adapt=ring.tag == "Z").bracket_left(i, y, ell)

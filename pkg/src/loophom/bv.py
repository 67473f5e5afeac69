"""Rational BV composites through abelianization, for n odd.

For n odd the generators u_i have even degree, so S(V) is a polynomial ring and
the a_i anticommute in S(A).  Three stages are represented as dictionaries:

* S(V):          ``{exponents: coef}``
* A (x) S(V):    ``{(i, exponents): coef}``
* S2(A) (x) S(V): ``{((i, j), exponents): coef}`` with ``i < j``

and ``Q[u1u2] -> a1(x)u2 + a2(x)u1`` style rows are produced for the homology
classes of Q and W.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import errors
from .forms import IntersectionForm
from .homology import LoopComplex, cokernel_basis, homology_basis
from .linalg import axpy
from .rings import QQ
from .tensor import UAlgebra

TENSOR = "⊗"
ARROW = "↦"


def _require_odd(form: IntersectionForm) -> None:
    if form.n % 2 == 0:
        raise errors.ParityUnsupported(f"the BV composites need n odd, got n={form.n}", n=form.n)


def _add(out: dict, key, c) -> None:
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _lower(e: tuple, j: int) -> tuple:
    return e[:j] + (e[j] - 1,) + e[j + 1 :]


# --------------------------------------------------------------------------
# the three maps


def exponents(word, m: int) -> tuple:
    e = [0] * m
    for a in word:
        e[a] += 1
    return tuple(e)


def abelianize(complex_: LoopComplex, y: dict, ell: int) -> dict:
    """eta: U_ell coordinates to a polynomial in S(V)."""
    _require_odd(complex_.form)
    algebra = complex_.algebra
    m = algebra.m
    words = algebra.slice(ell).words
    out: dict = {}
    for k, c in y.items():
        w = words[k]
        if w is not None and algebra.change is None:
            _add(out, exponents(w, m), c)
        else:
            for word, v in algebra.lift({k: 1}, ell).items():
                _add(out, exponents(word, m), c * v)
    return {e: _norm(c) for e, c in out.items()}


def abelianize_a(complex_: LoopComplex, x: dict, ell: int) -> dict:
    """eta_w: A(x)U_ell coordinates (index ``i*dim + k``) to A(x)S(V)."""
    dim = complex_.dim(ell)
    parts: dict = {}
    for idx, c in x.items():
        i, k = divmod(idx, dim)
        parts.setdefault(i, {})[k] = c
    out: dict = {}
    for i in sorted(parts):
        for e, c in abelianize(complex_, parts[i], ell).items():
            _add(out, (i, e), c)
    return out


def delta_q(p: dict) -> dict:
    """Sum over i of e_i * a_i (x) (e with e_i lowered)."""
    out: dict = {}
    for e, c in p.items():
        for i, ei in enumerate(e):
            if ei:
                _add(out, (i, _lower(e, i)), ei * c)
    return out


def delta_w(w: dict) -> dict:
    """(i, e) to the sum over j of e_j * a_i a_j (x) (e with e_j lowered), with a_i a_j = -a_j a_i."""
    out: dict = {}
    for (i, e), c in w.items():
        for j, ej in enumerate(e):
            if not ej or j == i:
                continue
            key = ((i, j), _lower(e, j)) if i < j else ((j, i), _lower(e, j))
            _add(out, key, ej * c if i < j else -ej * c)
    return out


def beta(form: IntersectionForm) -> dict:
    """beta = sum_{i<j} c_ij a_i a_j as ``{(i, j): c}``; the a_i^2 terms vanish for n odd."""
    C = form.matrix
    return {(i, j): C[i][j] for i in range(form.m) for j in range(i + 1, form.m) if C[i][j]}


def divide_by_beta(x: dict, form: IntersectionForm) -> dict:
    """The q in S(V) with ``x == beta (x) q``, or NotDivisible.

    Multiplication by beta acts monomial by monomial, so the linear system
    splits into one overdetermined scalar equation per monomial of q.
    """
    b = beta(form)
    if not b:
        raise errors.NotDivisible("beta is zero")
    pivot = min(b)
    by_monomial: dict = {}
    for (pair, e), c in x.items():
        by_monomial.setdefault(e, {})[pair] = c
    q: dict = {}
    for e in sorted(by_monomial):
        coeffs = by_monomial[e]
        extra = sorted(set(coeffs) - set(b))
        if extra:
            i, j = extra[0]
            raise errors.NotDivisible(f"term a{i + 1}a{j + 1} does not occur in beta", monomial=list(e), pair=[i + 1, j + 1])
        value = _norm(Fraction(coeffs.get(pivot, 0)) / b[pivot])
        for pair, c in b.items():
            if coeffs.get(pair, 0) != value * c:
                raise errors.NotDivisible(
                    f"coefficient of a{pair[0] + 1}a{pair[1] + 1} is not {value} * {c}",
                    monomial=list(e),
                    pair=[pair[0] + 1, pair[1] + 1],
                )
        if value:
            q[e] = value
    return q


# --------------------------------------------------------------------------
# formatting


def monomial_str(e: tuple) -> str:
    parts = [f"u{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k]
    return "".join(parts) or "1"


def _pair_str(pair) -> str:
    i, j = pair
    return f"a{i + 1}a{j + 1}"


def _key_str(key) -> str:
    if isinstance(key, tuple) and len(key) == 2 and isinstance(key[1], tuple):
        head, e = key
        if head == "M":
            return f"[M]{TENSOR}{monomial_str(e)}"
        if isinstance(head, tuple):
            return f"{_pair_str(head)}{TENSOR}{monomial_str(e)}"
        return f"a{head + 1}{TENSOR}{monomial_str(e)}"
    return monomial_str(key)


def _sort_key(key):
    if isinstance(key, tuple) and len(key) == 2 and isinstance(key[1], tuple):
        head, e = key
        return (head if isinstance(head, tuple) else (head,), tuple(-x for x in e))
    return (tuple(-x for x in key),)


def combination_str(vec: dict, label=_key_str, order=_sort_key) -> str:
    """``a1⊗u2 + a2⊗u1``, ``3 a1⊗u1^2``, ``-1/2 [M]⊗1``; zero is ``0``."""
    if not vec:
        return "0"
    out = []
    for key in sorted(vec, key=order):
        c = vec[key]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = label(key) if mag == 1 else f"{mag} {label(key)}"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def coefficient_str(c) -> str:
    return str(_norm(c))


def _serial(vec: dict) -> list:
    return [[_key_str(k), coefficient_str(vec[k])] for k in sorted(vec, key=_sort_key)]


# --------------------------------------------------------------------------
# tables


@dataclass
class BVRow:
    summand: str  # "Q" or "W"
    word_length: int
    degree: int
    label: str
    representative: dict
    eta: dict
    image: dict
    witness: dict | None = None

    @property
    def output(self) -> dict:
        if self.summand == "Q":
            return self.image
        return {("M", e): c for e, c in self.witness.items()}

    def line(self) -> str:
        return f"{self.summand}[{self.label}] {ARROW} {combination_str(self.output)}"

    def to_json(self):
        row = {
            "summand": self.summand,
            "word_length": self.word_length,
            "degree": self.degree,
            "input": self.label,
            "abelianized": combination_str(self.eta),
            "output": combination_str(self.output),
            "row": self.line(),
        }
        if self.summand == "W":
            row["delta_w"] = combination_str(self.image)
            row["divisible"] = True
            row["witness"] = _serial(self.witness)
        return row


@dataclass
class BVReport:
    n: int
    m: int
    max_degree: int
    beta: dict
    rows: list = field(default_factory=list)

    def lines(self) -> list:
        out = [row.line() for row in self.rows]
        out.append(f"Z {ARROW} 0")
        return out

    def to_json(self):
        return {
            "n": self.n,
            "m": self.m,
            "max_degree": self.max_degree,
            "beta": combination_str(self.beta, label=_pair_str, order=None),
            "q_rows": [r.to_json() for r in self.rows if r.summand == "Q"],
            "w_rows": [r.to_json() for r in self.rows if r.summand == "W"],
            "delta_on_Z": "0",
        }


def _a_label(complex_: LoopComplex, x: dict, ell: int) -> str:
    dim = complex_.dim(ell)
    s = complex_.algebra.slice(ell)
    return combination_str({divmod(k, dim): c for k, c in x.items()}, label=lambda key: f"a{key[0] + 1}{TENSOR}{s.label(key[1])}", order=None)


def q_row(complex_: LoopComplex, ell: int, rep: dict) -> BVRow:
    n = complex_.form.n
    s = complex_.algebra.slice(ell)
    eta = abelianize(complex_, rep, ell)
    label = combination_str(rep, label=s.label, order=None)
    return BVRow("Q", ell, ell * (n - 1), label, rep, eta, delta_q(eta))


def w_row(complex_: LoopComplex, ell: int, rep: dict) -> BVRow:
    form = complex_.form
    eta = abelianize_a(complex_, rep, ell)
    image = delta_w(eta)
    label = _a_label(complex_, rep, ell)
    try:
        witness = divide_by_beta(image, form)
    except errors.NotDivisible as exc:
        raise errors.TheoremViolation(
            f"delta_w of W[{label}] is not divisible by beta",
            word_length=ell,
            representative=label,
            abelianized=combination_str(eta),
            delta_w=combination_str(image),
            reason=exc.message,
        ) from exc
    return BVRow("W", ell, form.n + ell * (form.n - 1), label, rep, eta, image, witness)


def bv_report(form: IntersectionForm, max_degree: int, complex_: LoopComplex | None = None) -> BVReport:
    """Tabulate eta_w . Delta on a basis of Q and eta_z . Delta on a basis of W."""
    _require_odd(form)
    if form.n <= 3:
        raise errors.NotApplicable(f"the BV composites are stated for n > 3, got n={form.n}", n=form.n)
    if form.ring.tag != "Q":
        form = form.with_ring(QQ)
    cx = complex_ if complex_ is not None else LoopComplex(form, QQ, algebra=UAlgebra(form, QQ, adapt=False))
    n, m = form.n, form.m
    report = BVReport(n, m, max_degree, beta(form))
    ell = 0
    while ell * (n - 1) <= max_degree:
        d_in = cx.d(ell - 1) if ell > 0 else []
        for k in cokernel_basis(QQ, d_in, cx.dim(ell)):
            report.rows.append(q_row(cx, ell, {k: 1}))
        ell += 1
    ell = 0
    while n + ell * (n - 1) <= max_degree:
        d_in = cx.dprime(ell - 1) if ell > 0 else []
        for rep in homology_basis(QQ, d_in, cx.d(ell), m * cx.dim(ell)):
            report.rows.append(w_row(cx, ell, rep))
        ell += 1
    report.rows.sort(key=lambda r: (r.degree, r.summand))
    return report


def shift_by(complex_: LoopComplex, vec: dict, image_cols: list, weights: dict) -> dict:
    """``vec`` plus a combination of image columns; used to change representatives."""
    out = dict(vec)
    for k, c in weights.items():
        axpy(QQ, out, c, image_cols[k])
    return out

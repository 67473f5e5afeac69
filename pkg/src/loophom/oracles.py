"""Independent cross-checks: a closed-form series, universal coefficients, Euler counts.

Also the seeded generator of random unimodular forms used by the sweeps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import errors
from .forms import IntersectionForm, base_change, hyperbolic_matrix, make_form
from .homology import GradedModuleSummary, compute
from .rings import CoefficientRing, parse_ring


@dataclass
class CheckResult:
    check: str
    passed: bool
    details: dict = field(default_factory=dict)
    mismatch: dict | None = None

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self):
        out = {"check": self.check, "passed": self.passed, "details": self.details}
        if self.mismatch is not None:
            out["mismatch"] = self.mismatch
        return out


# --------------------------------------------------------------------------
# spheres


def _poly_mul(a: list, b: list, top: int) -> list:
    out = [0] * (top + 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[: top + 1 - i]):
                out[i + j] += x * y
    return out


def sphere_product_series(n: int, g: int, max_degree: int) -> dict:
    """Coefficients of ((1 + t^n) / (1 - t^(n-1)))^(2g) up to ``max_degree``, zeros omitted.

    Rationally LS^n has series (1 + t^n)/(1 - t^(n-1)) for odd n, and the loop
    space of a product is the product of loop spaces, so the 2g sphere factors
    of g copies of S^n x S^n multiply by Kunneth.
    """
    if n % 2 == 0:
        raise errors.ParityUnsupported(f"the sphere oracle is for odd n, got n={n}", n=n)
    if n < 3:
        raise errors.ValidationError(f"the sphere oracle needs n >= 3, got n={n}", n=n)
    if g < 1 or max_degree < 0:
        raise errors.ValidationError("need g >= 1 and max_degree >= 0")
    top = max_degree
    numerator = [0] * (top + 1)
    numerator[0] = 1
    if n <= top:
        numerator[n] = 1
    geometric = [1 if k % (n - 1) == 0 else 0 for k in range(top + 1)]
    factor = _poly_mul(numerator, geometric, top)
    series = [1] + [0] * top
    for _ in range(2 * g):
        series = _poly_mul(series, factor, top)
    return {k: c for k, c in enumerate(series) if c}


def sphere_check(n: int, g: int, max_degree: int, ring="Q") -> CheckResult:
    from .forms import preset

    summary = compute(preset("hyperbolic", n, ring, g=g), parse_ring(ring), max_degree)
    got = {k: r for k, r in summary.ranks().items() if r}
    want = sphere_product_series(n, g, max_degree)
    result = CheckResult("sphere_product", got == want, {"n": n, "g": g, "max_degree": max_degree})
    if not result.passed:
        k = min(d for d in set(got) | set(want) if got.get(d, 0) != want.get(d, 0))
        result.mismatch = {"degree": k, "computed": got.get(k, 0), "expected": want.get(k, 0)}
    return result


# --------------------------------------------------------------------------
# universal coefficients


def _count_divisible(factors, p: int) -> int:
    return sum(1 for f in factors if f % p == 0)


def ucoeff_check(summary_z: GradedModuleSummary, summary_f: GradedModuleSummary, p: int) -> CheckResult:
    """dim_{F_p} H_k = rank H_k + #(p | torsion at k) + #(p | torsion at k-1), for every k."""
    details = {"p": p, "max_degree": summary_z.max_degree}
    if summary_z.max_degree != summary_f.max_degree or summary_z.n != summary_f.n or summary_z.m != summary_f.m:
        return CheckResult("universal_coefficients", False, details, {"reason": "summaries are for different inputs"})
    tz = summary_z.totals()
    tf = summary_f.totals()
    for k in sorted(tz):
        rank, factors = tz[k]
        below = tz[k - 1][1] if k - 1 in tz else []
        expected = rank + _count_divisible(factors, p) + _count_divisible(below, p)
        got = tf[k][0]
        if got != expected:
            return CheckResult("universal_coefficients", False, details, {"degree": k, "field_dimension": got, "expected": expected})
    return CheckResult("universal_coefficients", True, details)


# --------------------------------------------------------------------------
# Euler characteristic of each three-term column


def euler_check(form: IntersectionForm, field_ring: CoefficientRing, ell_max: int, summary: GradedModuleSummary | None = None) -> CheckResult:
    """dim U_l - m dim U_{l-1} + dim U_{l-2} == Q_l - W_{l-1} + Z_{l-2} for 2 <= l <= ell_max.

    The right side is read off the degree-indexed summary, so the check also
    exercises the placement of the pieces in total degree.
    """
    from .tensor import UAlgebra

    ring = parse_ring(field_ring)
    if not ring.is_field:
        raise errors.InvalidRing("euler_check needs field coefficients")
    n, m = form.n, form.m
    top = max(ell_max, 0) * (n - 1) + 2
    if summary is None:
        summary = compute(form, ring, top)
    algebra = UAlgebra(form, ring)
    details = {"ring": ring.label(), "ell_max": ell_max}

    def rank_at(summand, ell):
        if ell < 0:
            return 0
        piece = summary.piece(summand, ell)
        if piece is None:
            raise errors.InternalInconsistency(f"summary lacks {summand}_{ell}")
        return piece.free_rank

    for ell in range(2, ell_max + 1):
        lhs = algebra.dim(ell) - m * algebra.dim(ell - 1) + algebra.dim(ell - 2)
        rhs = rank_at("Q", ell) - rank_at("W", ell - 1) + rank_at("Z", ell - 2)
        if lhs != rhs:
            return CheckResult("euler", False, details, {"word_length": ell, "slices": lhs, "homology": rhs})
    return CheckResult("euler", True, details)


# --------------------------------------------------------------------------
# random forms


def _elementary_conjugation(rng: random.Random, m: int, steps: int, bound: int) -> list:
    P = [[int(i == j) for j in range(m)] for i in range(m)]
    for _ in range(steps):
        i, j = rng.sample(range(m), 2)
        c = rng.choice([k for k in range(-bound, bound + 1) if k])
        for r in range(m):
            P[r][j] += c * P[r][i]
    perm = list(range(m))
    rng.shuffle(perm)
    signs = [rng.choice((1, -1)) for _ in range(m)]
    return [[P[r][perm[j]] * signs[j] for j in range(m)] for r in range(m)]


def random_form(n: int, m: int, seed: int, *, steps: int | None = None, bound: int = 2, force: bool = False) -> IntersectionForm:
    """A unimodular form P^T J P with J standard and P a product of bounded elementary moves.

    J is hyperbolic for odd n; for even n it is hyperbolic or a diagonal of signs
    (always diagonal when m is odd), chosen by the seed.
    """
    if m < 1:
        raise errors.ValidationError("m must be positive")
    if n % 2 == 1 and m % 2 == 1:
        raise errors.OddRankSkew(f"n={n} is odd but m={m} is odd: no nonsingular skew form exists", n=n, m=m)
    rng = random.Random(f"loophom:{n}:{m}:{seed}")
    if n % 2 == 1 or (m % 2 == 0 and rng.random() < 0.5):
        J = hyperbolic_matrix(n, m // 2)
    else:
        J = tuple(tuple(rng.choice((1, -1)) if i == j else 0 for j in range(m)) for i in range(m))
    base = make_form(n, J, force=force)
    if m == 1:
        return base
    P = _elementary_conjugation(rng, m, steps if steps is not None else 2 * m, bound)
    return base_change(base, P)


def random_unimodular(m: int, seed, steps: int | None = None, bound: int = 2) -> list:
    """A seeded unimodular integer matrix (for base-change tests)."""
    rng = random.Random(f"loophom:P:{m}:{seed}")
    if m == 1:
        return [[rng.choice((1, -1))]]
    return _elementary_conjugation(rng, m, steps if steps is not None else 2 * m, bound)

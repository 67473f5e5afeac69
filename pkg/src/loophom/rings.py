"""Coefficient rings: the integers, the rationals and prime fields.

Elements are plain Python ``int`` (Z, F_p) or ``int``/``Fraction`` (Q).  Rational
values with denominator 1 are kept as ``int`` so that the common integral case
stays on the fast path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidRing

MAX_PRIME = 2**31


@dataclass(frozen=True)
class CoefficientRing:
    tag: str  # "Z", "Q" or "Fp"
    p: int = 0

    @property
    def is_field(self) -> bool:
        return self.tag != "Z"

    @property
    def characteristic(self) -> int:
        return self.p if self.tag == "Fp" else 0

    def norm(self, x):
        if self.tag == "Fp":
            return x % self.p
        if self.tag == "Q" and type(x) is Fraction and x.denominator == 1:
            return x.numerator
        return x

    def is_unit(self, x) -> bool:
        if self.tag == "Z":
            return x == 1 or x == -1
        return x != 0

    def inv(self, x):
        if self.tag == "Fp":
            return pow(x, -1, self.p)
        if self.tag == "Q":
            return self.norm(Fraction(1) / x)
        if x in (1, -1):
            return x
        raise ZeroDivisionError(f"{x} is not a unit in Z")

    def label(self) -> str:
        return f"F{self.p}" if self.tag == "Fp" else self.tag

    def to_json(self):
        return {"Fp": self.p} if self.tag == "Fp" else self.tag

    def __str__(self):
        return self.label()


ZZ = CoefficientRing("Z")
QQ = CoefficientRing("Q")


def GF(p: int) -> CoefficientRing:
    from sympy import isprime

    if not isinstance(p, int) or isinstance(p, bool) or p < 2 or p >= MAX_PRIME or not isprime(p):
        raise InvalidRing(f"field characteristic must be a prime below 2^31, got {p!r}")
    return CoefficientRing("Fp", p)


def parse_ring(raw) -> CoefficientRing:
    """Accept "Z", "Q", {"Fp": p} and the CLI spellings "F2", "Fp:3", "GF(5)"."""
    if isinstance(raw, CoefficientRing):
        return raw
    if isinstance(raw, dict):
        if set(raw) == {"Fp"}:
            return GF(raw["Fp"])
        raise InvalidRing(f"unrecognised ring object {raw!r}")
    if isinstance(raw, str):
        s = raw.strip()
        if s in ("Z", "ZZ"):
            return ZZ
        if s in ("Q", "QQ"):
            return QQ
        for prefix in ("Fp:", "GF(", "F"):
            if s.startswith(prefix):
                digits = s[len(prefix):].rstrip(")")
                if digits.isdigit():
                    return GF(int(digits))
    raise InvalidRing(f"unrecognised ring {raw!r}; use Z, Q or Fp")

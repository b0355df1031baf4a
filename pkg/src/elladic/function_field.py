"""Desk-scale model of the rational function field F_q(t) and its adeles.

Places are the monic irreducibles of F_q[t] plus the place at infinity.
The completion at a finite place P is modelled as kappa(P)((u)) with
kappa(P) = F_q[s]/(P) and local coordinate u = t - theta, where theta is
the class of s; Laurent coefficients therefore live in the residue field
and multiply with no carries.  At infinity the coordinate is 1/t and the
residue field is F_q.

The additive character is the residue character of the differential dt:
psi_v(x) = psi_0(Tr(res_v(x dt))) where psi_0 is a fixed nontrivial
character of F_p realized inside a configured l-adic coefficient field.
dt is regular at finite places and has a double pole at infinity, so
psi_v is trivial on O_v at finite v and trivial exactly on p_inf^2 at
infinity.  The product of the local characters is trivial on the diagonal
copy of the field (residue theorem), which the test-suite verifies.

All data here is immutable and every operation is a pure function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import ConfigMismatch, InsufficientPrecision, TooLarge
from .gf import (ExtField, GF, fp_add, fp_crt, fp_divmod, fp_factor, fp_gcd,
                 fp_is_irreducible, fp_mod, fp_monic, fp_mul, fp_neg, fp_sub,
                 fp_trim, gf_field, is_prime, smallest_irreducible)
from .padic import FieldConfig, LocalNumber, pth_roots_of_unity

INF = float("inf")

DEFAULT_SERIES_PRECISION = 16
DEFAULT_ENUMERATION_CAP = 10 ** 6


@dataclass(frozen=True)
class GroundField:
    """The constant field F_q, q = p^f, with a fixed modulus over Z/p."""

    p: int
    f: int = 1
    modulus: tuple = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.f < 1:
            raise ValueError("f must be >= 1")
        if self.modulus is None:
            object.__setattr__(self, "modulus", smallest_irreducible(self.p, self.f))
        else:
            object.__setattr__(self, "modulus", tuple(c % self.p for c in self.modulus))
        gf_field(self.p, self.f, self.modulus)

    @property
    def q(self) -> int:
        return self.p ** self.f

    def field(self) -> GF:
        return gf_field(self.p, self.f, self.modulus)

    # -- element and polynomial builders -------------------------------------

    def element(self, n: int):
        return self.field().from_int(n)

    def poly(self, ints) -> tuple:
        """Polynomial over F_q from integer codes, ascending degree."""
        F = self.field()
        return fp_trim(F, tuple(F.from_int(c) for c in ints))

    def rational(self, num_ints, den_ints=(1,)) -> "RationalFunction":
        return RationalFunction.make(self, self.poly(num_ints), self.poly(den_ints))

    def t(self) -> "RationalFunction":
        return self.rational((0, 1))

    def constant(self, n: int) -> "RationalFunction":
        return self.rational((n,))

    def zero_rf(self) -> "RationalFunction":
        return RationalFunction.make(self, (), self.poly((1,)))

    def infinity(self) -> "Place":
        return Place(self, None)

    def place(self, ints) -> "Place":
        return Place(self, self.poly(ints))


@dataclass(frozen=True)
class Place:
    """A closed point of the projective line: a monic irreducible of
    F_q[t], or None for the place at infinity."""

    ground: GroundField
    poly: tuple | None

    def __post_init__(self):
        if self.poly is not None:
            F = self.ground.field()
            object.__setattr__(self, "poly", fp_trim(F, tuple(self.poly)))
            if len(self.poly) < 2:
                raise ValueError("a finite place needs a polynomial of degree >= 1")
            if self.poly[-1] != F.one:
                raise ValueError("place polynomial must be monic")
            if not fp_is_irreducible(F, self.poly):
                raise ValueError("place polynomial must be irreducible")

    @property
    def is_infinity(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.is_infinity else len(self.poly) - 1

    def residue(self) -> ExtField:
        return _residue_field(self)

    def sort_key(self):
        if self.is_infinity:
            return (0,)
        F = self.ground.field()
        return (1, self.degree, tuple(F.to_int(c) for c in self.poly))

    def __lt__(self, other: "Place"):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        if self.is_infinity:
            return "Place(infinity)"
        F = self.ground.field()
        return f"Place{tuple(F.to_int(c) for c in self.poly)}"


@lru_cache(maxsize=None)
def _residue_field(place: Place) -> ExtField:
    base = place.ground.field()
    if place.is_infinity:
        return ExtField(base, (base.zero, base.one))
    return ExtField(base, place.poly)


def enumerate_places(ground: GroundField, max_degree: int):
    """Infinity first, then finite places by (degree, coefficient code)."""
    yield ground.infinity()
    F = ground.field()
    for deg in range(1, max_degree + 1):
        for code in itertools.product(range(ground.q), repeat=deg):
            poly = tuple(F.from_int(c) for c in reversed(code)) + (F.one,)
            if fp_is_irreducible(F, poly):
                yield Place(ground, poly)


@dataclass(frozen=True)
class RationalFunction:
    """num/den in lowest terms with monic denominator; () is the zero
    numerator."""

    ground: GroundField
    num: tuple
    den: tuple

    @classmethod
    def make(cls, ground: GroundField, num, den) -> "RationalFunction":
        F = ground.field()
        num, den = fp_trim(F, tuple(num)), fp_trim(F, tuple(den))
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return cls(ground, (), (F.one,))
        g = fp_gcd(F, num, den)
        if len(g) > 1:
            num = fp_divmod(F, num, g)[0]
            den = fp_divmod(F, den, g)[0]
        lead_inv = F.inv(den[-1])
        num = tuple(F.mul(c, lead_inv) for c in num)
        den = tuple(F.mul(c, lead_inv) for c in den)
        return cls(ground, num, den)

    @property
    def is_zero(self) -> bool:
        return not self.num

    def _check(self, other):
        if self.ground != other.ground:
            raise ConfigMismatch("rational functions over different ground fields")

    def __add__(self, other):
        self._check(other)
        F = self.ground.field()
        num = fp_add(F, fp_mul(F, self.num, other.den), fp_mul(F, other.num, self.den))
        return RationalFunction.make(self.ground, num, fp_mul(F, self.den, other.den))

    def __neg__(self):
        F = self.ground.field()
        return RationalFunction(self.ground, fp_neg(F, self.num), self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        F = self.ground.field()
        return RationalFunction.make(self.ground, fp_mul(F, self.num, other.num),
                                     fp_mul(F, self.den, other.den))

    def inv(self) -> "RationalFunction":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction.make(self.ground, self.den, self.num)

    def __truediv__(self, other):
        return self * other.inv()

    def __pow__(self, e: int):
        if self.is_zero:
            if e == 0:
                return self.ground.constant(1)
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return self
        base = self.inv() if e < 0 else self
        e = abs(e)
        out = self.ground.constant(1)
        for _ in range(e):
            out = out * base
        return out

    def ord_at(self, place: Place):
        """Exact valuation at a place; +inf for the zero function."""
        if self.is_zero:
            return INF
        if place.is_infinity:
            return (len(self.den) - 1) - (len(self.num) - 1)
        F = self.ground.field()

        def mult(poly):
            m = 0
            while True:
                quot, rem = fp_divmod(F, poly, place.poly)
                if rem:
                    return m
                poly, m = quot, m + 1

        return mult(self.num) - mult(self.den)

    def pole_places(self):
        """[(place, multiplicity)] over the finite poles (denominator
        factors); infinity is not included."""
        F = self.ground.field()
        return tuple((Place(self.ground, f), m) for f, m in fp_factor(F, self.den))

    def zero_places(self):
        if self.is_zero:
            raise ValueError("zero function has no zero divisor")
        F = self.ground.field()
        num = fp_monic(F, self.num)
        return tuple((Place(self.ground, f), m) for f, m in fp_factor(F, num))

    def __repr__(self):
        F = self.ground.field()
        n = [F.to_int(c) for c in self.num]
        d = [F.to_int(c) for c in self.den]
        return f"RationalFunction({n}/{d} over F_{self.ground.q})"


# ---------------------------------------------------------------------------
# local elements
# ---------------------------------------------------------------------------

class LocalElement:
    """A truncated Laurent series at a place.

    Nonzero: v is the exact valuation and coeffs are residue-field
    coefficients with coeffs[0] != 0; the value is known modulo u^(v+len)
    unless exact_tail is set, in which case every further coefficient is
    exactly zero.  Empty coeffs encode zero: exact zero when exact_tail,
    otherwise only "0 modulo u^v".
    """

    __slots__ = ("place", "v", "coeffs", "exact_tail")

    def __init__(self, place: Place, v: int, coeffs: tuple, exact_tail: bool):
        self.place = place
        self.v = v
        self.coeffs = coeffs
        self.exact_tail = exact_tail

    @classmethod
    def exact_zero(cls, place: Place) -> "LocalElement":
        return cls(place, 0, (), True)

    @classmethod
    def from_coeffs(cls, place: Place, v: int, coeffs, exact: bool = True) -> "LocalElement":
        return make_local(place, v, tuple(coeffs), exact)

    @classmethod
    def uniformizer_power(cls, place: Place, j: int) -> "LocalElement":
        K = place.residue()
        return cls(place, j, (K.one,), True)

    @property
    def is_exact_zero(self) -> bool:
        return not self.coeffs and self.exact_tail

    @property
    def is_zero_like(self) -> bool:
        return not self.coeffs

    def abs_prec(self):
        return INF if self.exact_tail else self.v + len(self.coeffs)

    def valuation(self):
        if self.is_exact_zero:
            return INF
        if not self.coeffs:
            raise InsufficientPrecision(
                f"value is 0 mod u^{self.v} but not certifiably zero")
        return self.v

    def coefficient(self, i: int):
        """Laurent coefficient at u^i; raises when i is past the certified
        range."""
        K = self.place.residue()
        if not self.coeffs:
            if self.exact_tail or i < self.v:
                return K.zero
            raise InsufficientPrecision(f"coefficient {i} beyond certified 0 mod u^{self.v}")
        if i < self.v:
            return K.zero
        if i < self.v + len(self.coeffs):
            return self.coeffs[i - self.v]
        if self.exact_tail:
            return K.zero
        raise InsufficientPrecision(
            f"coefficient {i} beyond precision O(u^{self.v + len(self.coeffs)})")

    def shift(self, j: int) -> "LocalElement":
        """Multiplication by u^j."""
        if self.is_exact_zero:
            return self
        return LocalElement(self.place, self.v + j, self.coeffs, self.exact_tail)

    def __neg__(self):
        K = self.place.residue()
        return LocalElement(self.place, self.v,
                            tuple(K.neg(c) for c in self.coeffs), self.exact_tail)

    def _check(self, other):
        if self.place != other.place:
            raise ConfigMismatch("local elements at different places")

    def __add__(self, other):
        self._check(other)
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        K = self.place.residue()
        bound = min(self.abs_prec(), other.abs_prec())
        lo = min(self.v, other.v)
        if bound is INF:
            hi = max(self.v + len(self.coeffs), other.v + len(other.coeffs))
        else:
            hi = bound
        if hi <= lo:
            return make_local(self.place, lo, (), False)
        coeffs = tuple(K.add(self.coefficient(i), other.coefficient(i))
                       for i in range(lo, int(hi)))
        return make_local(self.place, lo, coeffs, bound is INF)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        if self.is_exact_zero or other.is_exact_zero:
            return LocalElement.exact_zero(self.place)
        if self.is_zero_like or other.is_zero_like:
            # O(u^a) * (u^b unit) is 0 mod u^(a+b)
            a = self.v if self.is_zero_like else self.valuation()
            b = other.v if other.is_zero_like else other.valuation()
            return make_local(self.place, a + b, (), False)
        K = self.place.residue()
        if self.exact_tail and other.exact_tail:
            n = len(self.coeffs) + len(other.coeffs) - 1
            exact = True
        else:
            n = int(min(self.abs_prec() + other.v, other.abs_prec() + self.v)
                    - (self.v + other.v))
            exact = False
        out = [K.zero] * n
        for i, ci in enumerate(self.coeffs):
            if K.is_zero(ci):
                continue
            for j, cj in enumerate(other.coeffs):
                if i + j >= n:
                    break
                out[i + j] = K.add(out[i + j], K.mul(ci, cj))
        return make_local(self.place, self.v + other.v, tuple(out), exact)

    def inverse(self, length: int | None = None) -> "LocalElement":
        """Series inverse; length bounds the output when the input has an
        exact tail (the inverse is usually an infinite series)."""
        if self.is_zero_like:
            raise ZeroDivisionError("inverse of a (possibly) zero local element")
        K = self.place.residue()
        if self.exact_tail and len(self.coeffs) == 1:
            return LocalElement(self.place, -self.v, (K.inv(self.coeffs[0]),), True)
        if self.exact_tail:
            if length is None:
                length = DEFAULT_SERIES_PRECISION
            n = length
        else:
            n = len(self.coeffs)
        c0_inv = K.inv(self.coeffs[0])
        out = [c0_inv]
        for k in range(1, n):
            acc = K.zero
            for i in range(1, min(k, len(self.coeffs) - 1) + 1):
                acc = K.add(acc, K.mul(self.coeffs[i], out[k - i]))
            out.append(K.neg(K.mul(c0_inv, acc)))
        return LocalElement(self.place, -self.v, tuple(out), False)

    def prefix(self, n: int) -> tuple:
        """First n unit coefficients (index v..v+n-1), padded exactly."""
        return tuple(self.coefficient(self.v + i) for i in range(n))

    def __eq__(self, other):
        if not isinstance(other, LocalElement):
            return NotImplemented
        return (self.place == other.place and self.v == other.v
                and self.coeffs == other.coeffs and self.exact_tail == other.exact_tail)

    def __hash__(self):
        return hash((self.place, self.v, self.coeffs, self.exact_tail))

    def __repr__(self):
        if self.is_exact_zero:
            return f"LocalElement(0 at {self.place!r})"
        if not self.coeffs:
            return f"LocalElement(O(u^{self.v}) at {self.place!r})"
        tail = "" if self.exact_tail else f" + O(u^{self.v + len(self.coeffs)})"
        return f"LocalElement(u^{self.v} * {len(self.coeffs)} coeffs{tail} at {self.place!r})"


def make_local(place: Place, v: int, coeffs: tuple, exact_tail: bool) -> LocalElement:
    K = place.residue()
    i = 0
    while i < len(coeffs) and K.is_zero(coeffs[i]):
        i += 1
    if i == len(coeffs):
        if exact_tail:
            return LocalElement.exact_zero(place)
        return LocalElement(place, v + len(coeffs), (), False)
    coeffs = coeffs[i:]
    if exact_tail:
        j = len(coeffs)
        while j and K.is_zero(coeffs[j - 1]):
            j -= 1
        coeffs = coeffs[:j]
    return LocalElement(place, v + i, coeffs, exact_tail)


# ---------------------------------------------------------------------------
# expansion of rational functions
# ---------------------------------------------------------------------------

def _shifted_poly(poly, place: Place):
    """Coefficients of A(theta + u) over the residue field, exact."""
    K = place.residue()
    theta = K.gen()
    acc: tuple = ()
    for c in reversed(poly):
        acc = fp_mul(K, acc, (theta, K.one))
        acc = fp_add(K, acc, (K.from_base(c),))
    return acc


def _series_quotient(K, num, den, n: int):
    """First n coefficients of num/den as power series over K; den[0] != 0."""
    d0_inv = K.inv(den[0])
    out = []
    for k in range(n):
        acc = num[k] if k < len(num) else K.zero
        for i in range(1, min(k, len(den) - 1) + 1):
            acc = K.sub(acc, K.mul(den[i], out[k - i]))
        out.append(K.mul(acc, d0_inv))
    return tuple(out)


def expand_at(r: RationalFunction, place: Place, M: int = DEFAULT_SERIES_PRECISION) -> LocalElement:
    """Laurent expansion of r at the place, with exact valuation and M
    coefficients (or an exact tail when the expansion terminates)."""
    if r.ground != place.ground:
        raise ConfigMismatch("rational function and place over different ground fields")
    if r.is_zero:
        return LocalElement.exact_zero(place)
    if M < 1:
        raise ValueError("M must be >= 1")
    K = place.residue()
    if place.is_infinity:
        num = tuple(K.from_base(c) for c in reversed(r.num))
        den = tuple(K.from_base(c) for c in reversed(r.den))
        v = (len(r.den) - 1) - (len(r.num) - 1)
        ord_n = ord_d = 0
    else:
        num = _shifted_poly(r.num, place)
        den = _shifted_poly(r.den, place)
        ord_n = next(i for i, c in enumerate(num) if not K.is_zero(c))
        ord_d = next(i for i, c in enumerate(den) if not K.is_zero(c))
        num, den = num[ord_n:], den[ord_d:]
        v = ord_n - ord_d
    if len(den) == 1:
        inv0 = K.inv(den[0])
        coeffs = tuple(K.mul(c, inv0) for c in num)
        if len(coeffs) <= M:
            return make_local(place, v, coeffs, True)
        return make_local(place, v, coeffs[:M], False)
    return make_local(place, v, _series_quotient(K, num, den, M), False)


# ---------------------------------------------------------------------------
# the residue character
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PsiTarget:
    """Where character values live: a p-th root of unity zeta inside the
    configured l-adic field, plus its power table."""

    ground: GroundField
    config: FieldConfig
    zeta: LocalNumber
    powers: tuple

    @classmethod
    def create(cls, ground: GroundField, config: FieldConfig) -> "PsiTarget":
        p = ground.p
        roots = pth_roots_of_unity(config, p)
        zeta = next(r for r in roots if r != config.one())
        powers = [config.one()]
        for _ in range(p - 1):
            powers.append(powers[-1] * zeta)
        return cls(ground, config, zeta, tuple(powers))

    def psi0(self, a: int) -> LocalNumber:
        return self.powers[a % self.ground.p]


def residue_trace(place: Place, x: LocalElement):
    """Tr_{kappa(v)/F_p}(res_v(x dt)) as an int mod p.

    dt = du at finite places, dt = -u^{-2} du at infinity, so the residue
    reads off the coefficient at index -1 (finite) or minus the one at
    index +1 (infinity).
    """
    K = place.residue()
    if place.is_infinity:
        c = K.neg(x.coefficient(1))
    else:
        c = x.coefficient(-1)
    base_elt = K.trace_to_base(c)
    return place.ground.field().trace_to_prime(base_elt)


def psi_local(place: Place, x: LocalElement, target: PsiTarget) -> LocalNumber:
    """The local additive character: psi_0 of the residue trace."""
    if x.place != place:
        raise ConfigMismatch("local element does not live at the given place")
    if place.ground != target.ground:
        raise ConfigMismatch("psi target built for a different ground field")
    return target.psi0(residue_trace(place, x))


def psi_global(a: "Adele", target: PsiTarget) -> LocalNumber:
    """Product of the local characters over the support."""
    out = target.config.one()
    for place, x in a.items:
        out = out * psi_local(place, x, target)
    return out


# ---------------------------------------------------------------------------
# adeles and divisors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Adele:
    """A finitely supported adele; unlisted components are exactly zero."""

    ground: GroundField
    items: tuple  # sorted ((place, LocalElement)), no zero components

    @classmethod
    def make(cls, ground: GroundField, components) -> "Adele":
        cleaned = []
        seen = set()
        for place, x in components:
            if place in seen:
                raise ValueError("duplicate place in adele support")
            seen.add(place)
            if x.place != place:
                raise ConfigMismatch("component attached to the wrong place")
            if not x.is_exact_zero:
                cleaned.append((place, x))
        cleaned.sort(key=lambda kv: kv[0].sort_key())
        return cls(ground, tuple(cleaned))

    @classmethod
    def zero(cls, ground: GroundField) -> "Adele":
        return cls(ground, ())

    def get(self, place: Place) -> LocalElement:
        for pl, x in self.items:
            if pl == place:
                return x
        return LocalElement.exact_zero(place)

    def support(self):
        return tuple(pl for pl, _ in self.items)

    def __add__(self, other: "Adele"):
        if self.ground != other.ground:
            raise ConfigMismatch("adeles over different ground fields")
        places = {pl for pl, _ in self.items} | {pl for pl, _ in other.items}
        comps = [(pl, self.get(pl) + other.get(pl)) for pl in places]
        return Adele.make(self.ground, comps)

    def __neg__(self):
        return Adele(self.ground, tuple((pl, -x) for pl, x in self.items))


def principal_adele(r: RationalFunction, min_abs_finite: int = 0,
                    min_abs_infinity: int = 2, margin: int = 2,
                    extra_places=()) -> Adele:
    """The diagonal image of r, carried on its poles, infinity and any
    extra places, with enough precision to evaluate the residue character."""
    ground = r.ground
    places = {pl for pl, _ in r.pole_places()} | {ground.infinity()} | set(extra_places)
    comps = []
    for pl in places:
        needed = min_abs_infinity if pl.is_infinity else min_abs_finite
        ordv = r.ord_at(pl)
        if ordv is INF:
            continue
        M = max(1, int(needed - ordv) + margin)
        comps.append((pl, expand_at(r, pl, M)))
    return Adele.make(ground, comps)


def scale_adele(a: Adele, r: RationalFunction, min_abs_finite: int = 0,
                min_abs_infinity: int = 2, margin: int = 2) -> Adele:
    """Componentwise product of an adele with (the expansions of) r."""
    if r.is_zero:
        return Adele.zero(a.ground)
    comps = []
    for pl, x in a.items:
        needed = min_abs_infinity if pl.is_infinity else min_abs_finite
        ordv = int(r.ord_at(pl))
        M = max(1, int(needed - x.v - ordv) + margin)
        comps.append((pl, x * expand_at(r, pl, M)))
    return Adele.make(a.ground, comps)


@dataclass(frozen=True)
class Divisor:
    """A finitely supported integer-valued map on places."""

    ground: GroundField
    items: tuple  # sorted ((place, mult)), mult != 0

    @classmethod
    def make(cls, ground: GroundField, pairs) -> "Divisor":
        acc: dict = {}
        for place, m in pairs:
            if place.ground != ground:
                raise ConfigMismatch("place over a different ground field")
            acc[place] = acc.get(place, 0) + int(m)
        items = tuple(sorted(((pl, m) for pl, m in acc.items() if m),
                             key=lambda kv: kv[0].sort_key()))
        return cls(ground, items)

    @classmethod
    def zero(cls, ground: GroundField) -> "Divisor":
        return cls(ground, ())

    def get(self, place: Place) -> int:
        for pl, m in self.items:
            if pl == place:
                return m
        return 0

    def support(self):
        return tuple(pl for pl, _ in self.items)

    @property
    def degree(self) -> int:
        return sum(m * pl.degree for pl, m in self.items)

    def __add__(self, other: "Divisor"):
        if self.ground != other.ground:
            raise ConfigMismatch("divisors over different ground fields")
        return Divisor.make(self.ground, self.items + other.items)

    def __neg__(self):
        return Divisor(self.ground, tuple((pl, -m) for pl, m in self.items))


# ---------------------------------------------------------------------------
# Riemann-Roch, kernel sets, cosets
# ---------------------------------------------------------------------------

def _poly_power(F, poly, e: int):
    out = (F.one,)
    for _ in range(e):
        out = fp_mul(F, out, poly)
    return out


def rr_space(D: Divisor) -> tuple:
    """A basis of L(D) = {f : div(f) >= -D}, dimension max(deg D + 1, 0).

    On the projective line the basis is explicit: with B the product of
    the positive finite part and C the product of the negative finite
    part, the functions C t^i / B for 0 <= i <= deg D work.
    """
    ground = D.ground
    F = ground.field()
    bplus: tuple = (F.one,)
    c: tuple = (F.one,)
    n_inf = 0
    for pl, m in D.items:
        if pl.is_infinity:
            n_inf = m
        elif m > 0:
            bplus = fp_mul(F, bplus, _poly_power(F, pl.poly, m))
        else:
            c = fp_mul(F, c, _poly_power(F, pl.poly, -m))
    deg_d = D.degree
    assert deg_d == (len(bplus) - 1) + n_inf - (len(c) - 1)
    if deg_d < 0:
        return ()
    basis = []
    for i in range(deg_d + 1):
        num = fp_mul(F, c, (F.zero,) * i + (F.one,))
        basis.append(RationalFunction.make(ground, num, bplus))
    return tuple(basis)


def span_nonzero(ground: GroundField, basis, cap: int = DEFAULT_ENUMERATION_CAP):
    """All nonzero F_q-linear combinations of the basis, in coefficient
    order; TooLarge when q^dim exceeds the cap."""
    q = ground.q
    dim = len(basis)
    if q ** dim > cap:
        raise TooLarge(f"{q}^{dim} combinations exceed the cap {cap}")
    F = ground.field()
    out = []
    for code in itertools.product(range(q), repeat=dim):
        if not any(code):
            continue
        acc = ground.zero_rf()
        for ci, b in zip(code, basis):
            if ci:
                scalar = RationalFunction.make(ground, (F.from_int(ci),), (F.one,))
                acc = acc + scalar * b
        out.append(acc)
    return tuple(out)


def psi_conductor_divisor(U: Divisor) -> Divisor:
    """The divisor whose Riemann-Roch space is exactly
    {gamma : gamma * p_v^{m_v} inside Ker psi_v for all v}: the finite
    exponents carry over and infinity is shifted by the double pole of dt."""
    ground = U.ground
    inf = ground.infinity()
    pairs = [(pl, m) for pl, m in U.items if not pl.is_infinity]
    pairs.append((inf, U.get(inf) - 2))
    return Divisor.make(ground, pairs)


def psi_kernel_set(U: Divisor, cap: int = DEFAULT_ENUMERATION_CAP) -> tuple:
    """The finite set {gamma in k^x : gamma * U_v in Ker psi_v for all v},
    where U encodes the open subgroup prod p_v^{m_v}."""
    return span_nonzero(U.ground, rr_space(psi_conductor_divisor(U)), cap)


def quotient_index(U: Divisor) -> int:
    """Index of the image of prod p_v^{m_v} inside adeles mod k.

    Exact for genus zero: the full integral adele ring surjects with
    kernel the constants, so the index is q^(sum m_v deg v - 1) when the
    exponent sum is positive and 1 otherwise.  Always a power of p.
    """
    total = 0
    for pl, m in U.items:
        if m < 0:
            raise ValueError("quotient_index requires all exponents >= 0")
        total += m * pl.degree
    if total == 0:
        return 1
    return U.ground.q ** (total - 1)


def coset_reps(U: Divisor, cap: int = DEFAULT_ENUMERATION_CAP) -> tuple:
    """Exactly quotient_index(U) adeles representing (A/k) / image(U).

    Representatives are integral adeles supported on the places with
    positive exponent, enumerated digit-by-digit; the diagonal constant
    field is normalized away by pinning the base coordinate of the first
    digit at the first place.
    """
    index = quotient_index(U)
    if index > cap:
        raise TooLarge(f"coset count {index} exceeds the cap {cap}")
    ground = U.ground
    supp = [(pl, m) for pl, m in U.items if m > 0]
    supp.sort(key=lambda kv: kv[0].sort_key())
    if not supp:
        return (Adele.zero(ground),)
    Fq = ground.field()

    position_choices = []
    for pi, (pl, m) in enumerate(supp):
        K = pl.residue()
        for digit in range(m):
            if pi == 0 and digit == 0:
                choices = [e for e in K.elements() if Fq.is_zero(e[0])]
            else:
                choices = list(K.elements())
            position_choices.append((pl, digit, choices))

    reps = []
    for combo in itertools.product(*(c for _, _, c in position_choices)):
        per_place: dict = {}
        for (pl, digit, _), value in zip(position_choices, combo):
            per_place.setdefault(pl, {})[digit] = value
        comps = []
        for pl, m in supp:
            K = pl.residue()
            coeffs = tuple(per_place[pl].get(i, K.zero) for i in range(m))
            comps.append((pl, LocalElement.from_coeffs(pl, 0, coeffs, exact=True)))
        reps.append(Adele.make(ground, comps))
    assert len(reps) == index
    return tuple(reps)


# ---------------------------------------------------------------------------
# weak approximation
# ---------------------------------------------------------------------------

def series_to_poly_mod(x: LocalElement, c: int) -> tuple:
    """The polynomial of degree < c*deg(v) congruent to the integral local
    element x modulo p_v^c (digit extraction in powers of the place)."""
    place = x.place
    if place.is_infinity:
        raise ValueError("digit extraction is defined at finite places only")
    if not x.is_exact_zero and x.abs_prec() < c:
        raise InsufficientPrecision(f"need absolute precision {c}")
    if not x.is_zero_like and x.v < 0:
        raise ValueError("digit extraction requires an integral element")
    ground = place.ground
    F = ground.field()
    K = place.residue()
    deg = place.degree
    p_rf = RationalFunction.make(ground, place.poly, (F.one,))
    p_inv = expand_at(p_rf, place, c + 2).inverse(c + 2)
    cur = x
    result: tuple = ()
    p_power: tuple = (F.one,)
    for _ in range(c):
        if cur.is_exact_zero:
            break
        # the digit is the image of cur in the residue field
        digit = K.zero if (cur.is_zero_like or cur.v >= 1) else cur.coefficient(0)
        if not K.is_zero(digit):
            lift = fp_trim(F, digit)  # class of s becomes a polynomial in t
            result = fp_add(F, result, fp_mul(F, lift, p_power))
            cur = cur - expand_at(RationalFunction.make(ground, lift, (F.one,)),
                                  place, deg + 1)
        cur = cur * p_inv
        p_power = fp_mul(F, p_power, place.poly)
    return result


def _smallest_unused_place(ground: GroundField, used) -> Place:
    used = set(used)
    for deg in range(1, 8):
        for pl in enumerate_places(ground, deg):
            if pl.is_infinity or pl.degree < deg:
                continue
            if pl not in used:
                return pl
    raise RuntimeError("no auxiliary place found (ground field too small?)")


def weak_approx(constraints) -> RationalFunction:
    """A global function matching finitely many local targets.

    Each constraint is (place, target LocalElement, h) and the output y
    satisfies ord_v(y - target) >= h.  Solved by polynomial CRT at the
    finite places with explicit coefficient prescriptions at infinity; an
    auxiliary unconstrained place absorbs extra poles when the infinity
    constraint and the finite congruences would otherwise conflict.
    """
    if not constraints:
        raise ValueError("weak_approx needs the ground field; pass at least one constraint")
    ground = constraints[0][0].ground
    seen = set()
    inf_constraint = None
    finite = []
    for place, target, h in constraints:
        if place.ground != ground:
            raise ConfigMismatch("constraints over different ground fields")
        if place in seen:
            raise ValueError("duplicate constraint place")
        seen.add(place)
        if target.place != place:
            raise ConfigMismatch("target attached to the wrong place")
        if place.is_infinity:
            inf_constraint = (target, int(h))
        else:
            finite.append((place, target, int(h)))

    F = ground.field()
    one: tuple = (F.one,)

    # pole allowance and congruence data at the finite places
    b_exp: dict = {}
    for place, target, h in finite:
        vt = 0 if target.is_zero_like else target.valuation()
        b_exp[place] = max(0, -int(min(vt, 0)))

    def build(B_poly):
        congruences = []
        for place, target, h in finite:
            c_v = h + b_exp[place]
            if c_v <= 0:
                continue
            if not target.is_exact_zero and target.abs_prec() < h:
                raise InsufficientPrecision(
                    f"target at {place!r} certified below requested precision {h}")
            v_t = target.v if target.coeffs else h
            Mv = max(1, h - v_t + 2)
            z = target * expand_at(RationalFunction.make(ground, B_poly, one), place, Mv)
            Z = series_to_poly_mod(z, c_v)
            congruences.append((Z, _poly_power(F, place.poly, c_v)))
        if congruences:
            A_crt, Pi = fp_crt(F, congruences)
        else:
            A_crt, Pi = (), one
        return A_crt, Pi

    if inf_constraint is None:
        B = one
        for place, _, _ in finite:
            B = fp_mul(F, B, _poly_power(F, place.poly, b_exp[place]))
        A_crt, _ = build(B)
        return RationalFunction.make(ground, A_crt, B)

    x_inf, h_inf = inf_constraint
    if not x_inf.is_exact_zero and x_inf.abs_prec() < h_inf:
        raise InsufficientPrecision("infinity target certified below requested precision")

    B0 = one
    for place, _, _ in finite:
        B0 = fp_mul(F, B0, _poly_power(F, place.poly, b_exp[place]))
    deg_pi_bound = sum((h + b_exp[pl]) * pl.degree for pl, _, h in finite)
    aux = _smallest_unused_place(ground, [pl for pl, _, _ in finite])

    # choose the auxiliary pole order so the top coefficients prescribed by
    # the infinity condition sit above everything the CRT determines
    target_deg = max(len(B0) - 1, deg_pi_bound + max(h_inf, 0) + 1)
    j = 0
    while (len(B0) - 1) + j * aux.degree < target_deg:
        j += 1
    B = fp_mul(F, B0, _poly_power(F, aux.poly, j))
    deg_bw = len(B) - 1

    A_crt, Pi = build(B)
    deg_pi = len(Pi) - 1
    j0 = max(0, deg_bw - h_inf + 1)
    assert j0 >= deg_pi, "auxiliary pole order too small"

    # prescribed high coefficients from w = x_inf * expansion(B) at infinity
    inf_pl = ground.infinity()
    if x_inf.is_exact_zero:
        w = LocalElement.exact_zero(inf_pl)
        k_max = -1
    else:
        need_abs = -j0 + 1
        Mw = max(1, int(need_abs - x_inf.v + deg_bw) + 2)
        w = x_inf * expand_at(RationalFunction.make(ground, B, one), inf_pl, Mw)
        k_max = -int(w.valuation()) if not w.is_zero_like else -1

    Kinf = inf_pl.residue()
    coeffs_high = {}
    for k in range(j0, max(k_max, j0 - 1) + 1):
        c = w.coefficient(-k) if not w.is_exact_zero else Kinf.zero
        if not Kinf.is_zero(c):
            coeffs_high[k] = c[0]  # kappa(inf) is F_q wrapped one level

    A_high: tuple = ()
    if coeffs_high:
        top = max(coeffs_high)
        A_high = fp_trim(F, tuple(coeffs_high.get(i, F.zero) for i in range(top + 1)))

    rem = fp_mod(F, fp_sub(F, A_crt, A_high), Pi)
    A = fp_add(F, A_high, rem)
    return RationalFunction.make(ground, A, B)

"""Global n = 2 verifier over F_q(t): pure-tensor Whittaker data, the
mirabolic expansion, Fourier coefficient extraction and the end-to-end
congruence pipeline.

A global specification assigns to each place either unramified Satake
data or a tabulated Kirillov function (a finitely supported function on
k_v^x described by coset/value pairs, plus its central character).  The
synthetic sum

    phi(g) = sum over gamma in k^x of prod_v W_v(diag(gamma,1) g)

is finite here because the unramified factors vanish off dominant
exponents and tabulated factors have finite support, which bounds the
pole divisor of contributing gamma; the support is enumerated through a
Riemann-Roch space.  No automorphy is claimed for phi: every identity
verified by this module holds termwise for arbitrary pure-tensor data.

Tabulated data is evaluated only at points of the mirabolic subgroup
times the center; queries outside that domain raise UnsupportedPoint.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import (BadSquareRoot, ConfigMismatch, IncompleteData,
                     NotCongruent, NotIntegral, SpecMismatch,
                     UnsupportedPoint)
from .function_field import (Adele, DEFAULT_ENUMERATION_CAP, Divisor,
                             GroundField, LocalElement, Place, PsiTarget,
                             RationalFunction, enumerate_places, expand_at,
                             coset_reps, psi_global, psi_local,
                             quotient_index, rr_space, scale_adele,
                             span_nonzero)
from .padic import FieldConfig, LocalNumber
from .satake import SatakeParam, char_poly, congruent, is_integral
from .whittaker import whittaker_value

INF = float("inf")


# ---------------------------------------------------------------------------
# local data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KirillovEntry:
    """One coset of k_v^x and the value taken there: the set
    uniformizer^j * rep * (1 + p_v^level), with level 0 meaning every unit."""

    j: int
    level: int
    rep: LocalElement
    value: LocalNumber

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("coset level must be >= 0")
        if self.rep.is_zero_like or self.rep.valuation() != 0:
            raise ValueError("coset representative must be a unit")
        if not self.rep.exact_tail and len(self.rep.coeffs) < self.level:
            raise ValueError("representative carries fewer digits than its level")

    def key(self):
        return (self.j, self.rep.prefix(self.level))

    def contains(self, y: LocalElement) -> bool:
        if y.valuation() != self.j:
            return False
        if self.level == 0:
            return True
        unit = y.shift(-self.j)
        return unit.prefix(self.level) == self.rep.prefix(self.level)


@dataclass(frozen=True)
class KirillovTable:
    """A smooth compactly supported function on k_v^x, zero off the listed
    cosets.  Cosets must be pairwise disjoint."""

    place: Place
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for e in self.entries:
            if e.rep.place != self.place:
                raise ConfigMismatch("entry representative at the wrong place")
        for i, e1 in enumerate(self.entries):
            for e2 in self.entries[i + 1:]:
                if e1.j != e2.j:
                    continue
                m = min(e1.level, e2.level)
                if e1.rep.prefix(m) == e2.rep.prefix(m):
                    raise ValueError("overlapping cosets in Kirillov table")

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def a_valued(self) -> bool:
        return all(e.value.is_zero or e.value.v >= 0 for e in self.entries)

    def min_valuation(self):
        return min((e.j for e in self.entries), default=None)

    def max_level(self) -> int:
        return max((e.level for e in self.entries), default=0)

    def lookup(self, y: LocalElement) -> LocalNumber:
        """The table value at y in k_v^x; zero off the recorded support."""
        if y.is_exact_zero:
            raise ValueError("Kirillov functions are defined on nonzero elements")
        j = y.valuation()
        config = None
        for e in self.entries:
            config = e.value.config
            if e.j == j and e.contains(y):
                return e.value
        if config is None:
            raise ValueError("cannot produce a zero value from an empty table")
        return config.zero()

    def value_at_one(self) -> LocalNumber:
        return self.lookup(LocalElement.uniformizer_power(self.place, 0))


@dataclass(frozen=True)
class LocalCharacter:
    """A character of k_v^x: value at the uniformizer plus, for level >= 1,
    values on unit cosets mod 1 + p_v^level (units map to 1 at level 0)."""

    value_at_uniformizer: LocalNumber
    level: int = 0
    unit_values: tuple = ()

    def __post_init__(self):
        if self.value_at_uniformizer.is_zero:
            raise ValueError("character value at the uniformizer must be nonzero")
        if self.level == 0 and self.unit_values:
            raise ValueError("level 0 characters carry no unit table")
        if self.level >= 1:
            keys = [k for k, _ in self.unit_values]
            if len(set(keys)) != len(keys):
                raise ValueError("duplicate unit cosets")

    def unit_value(self, prefix: tuple) -> LocalNumber:
        for key, val in self.unit_values:
            if key == prefix:
                return val
        raise IncompleteData(f"character has no value on unit coset {prefix}")

    def evaluate(self, y: LocalElement) -> LocalNumber:
        j = y.valuation()
        out = self.value_at_uniformizer ** j
        if self.level >= 1:
            unit = y.shift(-j)
            out = out * self.unit_value(unit.prefix(self.level))
        return out


@dataclass(frozen=True)
class UnramifiedDatum:
    satake: SatakeParam

    def __post_init__(self):
        if self.satake.n != 2:
            raise ValueError("global evaluation supports rank 2 only")


@dataclass(frozen=True)
class TabulatedDatum:
    table: KirillovTable
    central: LocalCharacter


# ---------------------------------------------------------------------------
# global specification and evaluation points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GlobalWhittakerSpec:
    """Per-place local Whittaker data for one pure tensor.

    Explicitly listed places carry either datum kind; every other place is
    unramified with Satake data produced by the degree-keyed default rule.
    Tabulated places form the finite exceptional set S; at each of them
    except the distinguished place w the function must take the value 1 at
    the identity.
    """

    ground: GroundField
    config: FieldConfig
    explicit: tuple          # ((place, datum)) sorted by place
    default_rule: tuple      # ((degree, (mu1, mu2))) sorted by degree
    w: Place | None = None

    def __post_init__(self):
        listed = sorted(self.explicit, key=lambda kv: kv[0].sort_key())
        object.__setattr__(self, "explicit", tuple(listed))
        object.__setattr__(self, "default_rule",
                           tuple(sorted(self.default_rule, key=lambda kv: kv[0])))
        seen = set()
        for place, datum in self.explicit:
            if place in seen:
                raise ValueError("duplicate place in specification")
            seen.add(place)
            if place.ground != self.ground:
                raise ConfigMismatch("place over a different ground field")
            if isinstance(datum, UnramifiedDatum):
                if datum.satake.config != self.config:
                    raise ConfigMismatch("Satake data in a different coefficient field")
                if datum.satake.q != self.ground.q ** place.degree:
                    raise ValueError("Satake q does not match the place degree")
            elif isinstance(datum, TabulatedDatum):
                if datum.table.place != place:
                    raise ConfigMismatch("table attached to the wrong place")
            else:
                raise TypeError("unknown datum kind")
        for deg, pair in self.default_rule:
            if len(pair) != 2 or any(m.is_zero for m in pair):
                raise ValueError("default rule entries must be pairs of nonzero values")
        s_places = self.S
        if self.w is not None and self.w not in s_places:
            raise ValueError("the distinguished place must be tabulated")
        for place in s_places:
            if self.w is not None and place == self.w:
                continue
            datum = dict(self.explicit)[place]
            if datum.table.is_empty or datum.table.value_at_one() != self.config.one():
                raise ValueError(
                    f"tabulated place {place!r} must take the value 1 at the identity")

    @property
    def S(self) -> tuple:
        return tuple(pl for pl, d in self.explicit if isinstance(d, TabulatedDatum))

    def datum_at(self, place: Place):
        for pl, d in self.explicit:
            if pl == place:
                return d
        for deg, pair in self.default_rule:
            if deg == place.degree:
                S = SatakeParam(2, self.ground.q ** place.degree, tuple(pair))
                return UnramifiedDatum(S)
        raise IncompleteData(
            f"no default Satake rule for places of degree {place.degree}")


@dataclass(frozen=True)
class MirabolicPoint:
    """A point of Z(A) P(A) in factored form.

    entries lists (place, x, a1, a2) for the finitely many places where the
    component differs from the identity, giving the matrix
    [[u^a1, x], [0, u^a2]]; a2 must be 0 wherever tabulated data will be
    queried.  central lists uniformizer exponents of the central factor.
    """

    ground: GroundField
    entries: tuple = ()
    central: tuple = ()

    def __post_init__(self):
        ents = []
        for place, x, a1, a2 in self.entries:
            if x.place != place:
                raise ConfigMismatch("x component at the wrong place")
            if not (x.is_exact_zero and a1 == 0 and a2 == 0):
                ents.append((place, x, int(a1), int(a2)))
        ents.sort(key=lambda e: e[0].sort_key())
        if len({e[0] for e in ents}) != len(ents):
            raise ValueError("duplicate place in point support")
        object.__setattr__(self, "entries", tuple(ents))
        cents = tuple(sorted(((pl, int(c)) for pl, c in self.central if c),
                             key=lambda kv: kv[0].sort_key()))
        object.__setattr__(self, "central", cents)

    def get(self, place: Place):
        for pl, x, a1, a2 in self.entries:
            if pl == place:
                return x, a1, a2
        return LocalElement.exact_zero(place), 0, 0

    def central_at(self, place: Place) -> int:
        for pl, c in self.central:
            if pl == place:
                return c
        return 0

    def support(self) -> tuple:
        places = {e[0] for e in self.entries} | {pl for pl, _ in self.central}
        return tuple(sorted(places, key=lambda p: p.sort_key()))

    def shifted_by(self, u: Adele) -> "MirabolicPoint":
        """Left translation by the unipotent adele u: x_v += u_v * unif^a2."""
        places = set(self.support()) | set(u.support())
        entries = []
        for pl in places:
            x, a1, a2 = self.get(pl)
            uv = u.get(pl)
            if not uv.is_exact_zero:
                x = x + (uv.shift(a2) if a2 else uv)
            entries.append((pl, x, a1, a2))
        return MirabolicPoint(self.ground, tuple(entries), self.central)


# ---------------------------------------------------------------------------
# local evaluation
# ---------------------------------------------------------------------------

def local_value(datum, place: Place, x: LocalElement, a, central: int,
                target: PsiTarget, torus_unit: LocalElement | None = None):
    """One local factor of W at the matrix z * [[unit*u^a1, x], [0, u^a2]].

    Returns (coefficient, m) with the power q^(m/2) kept symbolic; m is
    expressed in half-powers of the ground q, so place degrees are already
    folded in.  The torus unit only matters for tabulated data, where the
    function is a genuine function of the full torus coordinate.
    """
    a1, a2 = a
    if isinstance(datum, UnramifiedDatum):
        psi_val = psi_local(place, x.shift(-a2) if a2 else x, target)
        if psi_val.is_zero:
            raise AssertionError("character values are never zero")
        wv = whittaker_value(datum.satake, (a1 + central, a2 + central))
        if wv.is_zero:
            return wv.coef, 0
        return psi_val * wv.coef, wv.q_half_exp * place.degree
    if a2 != 0:
        raise UnsupportedPoint(
            "tabulated data is defined on the mirabolic subgroup (a2 = 0)")
    psi_val = psi_local(place, x, target)
    y = LocalElement.uniformizer_power(place, a1)
    if torus_unit is not None and not torus_unit.is_exact_zero:
        y = torus_unit * y
    f_val = datum.table.lookup(y)
    if f_val.is_zero:
        return f_val, 0
    central_factor = datum.central.value_at_uniformizer ** central if central else None
    out = psi_val * f_val
    if central_factor is not None:
        out = out * central_factor
    return out, 0


def _sqrt_check(config: FieldConfig, sqrt_q: LocalNumber, q: int):
    diff = sqrt_q * sqrt_q - config.integer(q)
    if not diff.is_zero and diff.valuation() < config.precision:
        raise BadSquareRoot(f"supplied value does not square to {q}")


def gamma_support(spec: GlobalWhittakerSpec, point: MirabolicPoint,
                  cap: int = DEFAULT_ENUMERATION_CAP) -> tuple:
    """A finite superset of the gamma with nonzero term, as the nonzero
    part of a Riemann-Roch space built from the local vanishing bounds."""
    ground = spec.ground
    relevant = set(point.support()) | set(spec.S) | {ground.infinity()}
    pairs = []
    for pl in relevant:
        _, a1, a2 = point.get(pl)
        datum = spec.datum_at(pl)
        if isinstance(datum, TabulatedDatum):
            if a2 != 0:
                raise UnsupportedPoint("tabulated place queried with a2 != 0")
            min_j = datum.table.min_valuation()
            if min_j is None:
                return ()
            bound = a1 - min_j
        else:
            bound = a1 - a2
        if bound:
            pairs.append((pl, bound))
    D = Divisor.make(ground, pairs)
    return span_nonzero(ground, rr_space(D), cap)


def _gamma_term(spec: GlobalWhittakerSpec, point: MirabolicPoint,
                gamma: RationalFunction | None, target: PsiTarget):
    """The product of local values at diag(gamma,1) * point; gamma = None
    means gamma = 1.  Returns (coefficient, total half exponent)."""
    ground = spec.ground
    config = spec.config
    relevant = set(point.support()) | set(spec.S) | {ground.infinity()}
    if gamma is not None:
        for pl, _ in gamma.pole_places():
            relevant.add(pl)
        for pl, _ in gamma.zero_places():
            relevant.add(pl)
    coef = config.one()
    total_half = 0
    for pl in sorted(relevant, key=lambda p: p.sort_key()):
        x, a1, a2 = point.get(pl)
        c = point.central_at(pl)
        datum = spec.datum_at(pl)
        torus_unit = None
        if gamma is not None:
            ordg = int(gamma.ord_at(pl))
            need = 2 if pl.is_infinity else 0
            if isinstance(datum, TabulatedDatum):
                need = max(need, datum.table.max_level() + 1)
            xv = 0 if x.is_zero_like else x.v
            M = max(1, need - min(xv, 0) - ordg + 3)
            gexp = expand_at(gamma, pl, M)
            if not x.is_exact_zero:
                x = gexp * x
            torus_unit = gexp.shift(-ordg)
            a1 = a1 + ordg
        val, half = local_value(datum, pl, x, (a1, a2), c, target, torus_unit)
        if val.is_zero:
            return config.zero(), 0
        coef = coef * val
        total_half += half
    return coef, total_half


def mirabolic_expand(spec: GlobalWhittakerSpec, point: MirabolicPoint,
                     sqrt_q: LocalNumber, target: PsiTarget,
                     cap: int = DEFAULT_ENUMERATION_CAP) -> LocalNumber:
    """The finite sum over gamma of the Whittaker term at diag(gamma,1)g,
    collapsed to a plain field element through the supplied sqrt of q."""
    config = spec.config
    _sqrt_check(config, sqrt_q, spec.ground.q)
    support = gamma_support(spec, point, cap)
    acc = config.zero()
    for gamma in support:
        coef, half = _gamma_term(spec, point, gamma, target)
        if coef.is_zero:
            continue
        acc = acc + coef * sqrt_q ** half
    return acc


def whittaker_at(spec: GlobalWhittakerSpec, point: MirabolicPoint,
                 sqrt_q: LocalNumber, target: PsiTarget) -> LocalNumber:
    """The pure-tensor Whittaker function itself at the point."""
    config = spec.config
    _sqrt_check(config, sqrt_q, spec.ground.q)
    coef, half = _gamma_term(spec, point, None, target)
    if coef.is_zero:
        return coef
    return coef * sqrt_q ** half


def fourier_coefficient(phi, gamma: RationalFunction, point: MirabolicPoint,
                        U: Divisor, target: PsiTarget, config: FieldConfig,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> LocalNumber:
    """The gamma-th unipotent Fourier coefficient of phi at the point,
    as the exact average over the finite quotient of adeles mod k by U.

    phi must be invariant under translations from U (caller-asserted);
    the averaging denominator is a power of p, hence a unit in the
    coefficient field.
    """
    reps = coset_reps(U, cap)
    index = quotient_index(U)
    acc = config.zero()
    for u in reps:
        twist = psi_global(-scale_adele(u, gamma), target) if not gamma.is_zero \
            else config.one()
        acc = acc + twist * phi(point.shifted_by(u))
    return acc * config.integer(index).inv()


def invariance_divisor(spec: GlobalWhittakerSpec, point: MirabolicPoint,
                       extra: Divisor | None = None) -> Divisor:
    """An open subgroup divisor U fine enough that every gamma in the
    expansion support (enlarged by extra) pairs trivially with U under
    psi, making the mirabolic expansion U-invariant in the unipotent
    direction.

    The support is bounded by a pole divisor D; gamma p_v^{m_v} lands in
    Ker psi_v as soon as m_v >= D(v) shifted by the conductor of psi_v
    (two extra digits at infinity, where dt has its double pole).
    """
    ground = spec.ground
    relevant = set(point.support()) | set(spec.S) | {ground.infinity()}
    if extra is not None:
        relevant |= set(extra.support())
    pairs = []
    for pl in relevant:
        _, a1, a2 = point.get(pl)
        datum = spec.datum_at(pl)
        if isinstance(datum, TabulatedDatum):
            min_j = datum.table.min_valuation()
            bound = a1 - min_j if min_j is not None else 0
        else:
            bound = a1 - a2
        if extra is not None:
            bound += max(extra.get(pl), 0)
        m_v = bound + (2 if pl.is_infinity else 0)
        if m_v > 0:
            pairs.append((pl, m_v))
    return Divisor.make(ground, pairs)


# ---------------------------------------------------------------------------
# the congruence pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointReport:
    """Everything the pipeline measured at one sample point: both
    Whittaker values, both expansion values, and the verdicts."""

    index: int
    w_values: tuple      # (LocalNumber, LocalNumber)
    phi_values: tuple    # (LocalNumber, LocalNumber)
    w_congruent: bool
    phi_congruent: bool

    @property
    def w_valuations(self) -> tuple:
        return tuple(v.valuation() for v in self.w_values)

    @property
    def phi_valuations(self) -> tuple:
        return tuple(v.valuation() for v in self.phi_values)

    @property
    def ok(self) -> bool:
        return (self.w_congruent and self.phi_congruent
                and all(v >= 0 for v in self.w_valuations)
                and all(v >= 0 for v in self.phi_valuations))


@dataclass(frozen=True)
class PipelineReport:
    points: tuple

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.points)

    def to_dict(self) -> dict:
        from .jsonio import encode_local_number
        records = []
        for p in self.points:
            w1, w2 = p.w_values
            f1, f2 = p.phi_values
            records.append({
                "index": p.index,
                "W1": encode_local_number(w1),
                "W2": encode_local_number(w2),
                "phi1": encode_local_number(f1),
                "phi2": encode_local_number(f2),
                "W_valuations": [_val_json(v) for v in p.w_valuations],
                "phi_valuations": [_val_json(v) for v in p.phi_valuations],
                "W_residues": [_residue_json(v) for v in p.w_values],
                "phi_residues": [_residue_json(v) for v in p.phi_values],
                "congruent": p.w_congruent and p.phi_congruent,
                "ok": p.ok,
            })
        return {"points": records, "ok": self.ok}


def _val_json(v):
    return "inf" if v is INF or v == INF else int(v)


def _residue_json(x: LocalNumber):
    if not x.is_zero and x.v < 0:
        return None
    return list(x.reduce().coeffs)


def _residues_agree(x: LocalNumber, y: LocalNumber) -> bool:
    return x.reduce() == y.reduce()


def validate_spec_pair(spec1: GlobalWhittakerSpec, spec2: GlobalWhittakerSpec):
    """The pipeline preconditions: identical S, w and tabulated data;
    integral, congruent unramified data at every listed place and for
    every shared default degree."""
    if spec1.ground != spec2.ground or spec1.config != spec2.config:
        raise SpecMismatch("specifications over different fields")
    if spec1.S != spec2.S or spec1.w != spec2.w:
        raise SpecMismatch("exceptional sets differ")
    d1, d2 = dict(spec1.explicit), dict(spec2.explicit)
    for pl in spec1.S:
        t1, t2 = d1[pl], d2[pl]
        if t1.table != t2.table or t1.central != t2.central:
            raise SpecMismatch(f"tabulated data differs at {pl!r}")
        if not t1.table.a_valued():
            raise NotIntegral(f"table at {pl!r} is not integrally valued")
    listed = set(d1) | set(d2)
    for pl in listed:
        if pl in spec1.S:
            continue
        s1 = d1[pl].satake if pl in d1 else spec1.datum_at(pl).satake
        s2 = d2[pl].satake if pl in d2 else spec2.datum_at(pl).satake
        _check_satake_pair(s1, s2, pl)
    degrees = {deg for deg, _ in spec1.default_rule} | {deg for deg, _ in spec2.default_rule}
    for deg in degrees:
        q = spec1.ground.q ** deg
        try:
            s1 = SatakeParam(2, q, dict(spec1.default_rule)[deg])
            s2 = SatakeParam(2, q, dict(spec2.default_rule)[deg])
        except KeyError:
            raise SpecMismatch(f"default rules cover different degrees ({deg})")
        _check_satake_pair(s1, s2, f"default rule degree {deg}")


def _check_satake_pair(s1: SatakeParam, s2: SatakeParam, where):
    p1, p2 = char_poly(s1), char_poly(s2)
    if not (is_integral(p1) and is_integral(p2)):
        raise NotIntegral(f"non-integral Satake data at {where}")
    if not congruent(p1, p2):
        raise NotCongruent(f"Satake reductions differ at {where}")


def congruence_pipeline(spec1: GlobalWhittakerSpec, spec2: GlobalWhittakerSpec,
                        samples, sqrt_q: LocalNumber, target: PsiTarget,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> PipelineReport:
    """Evaluate both Whittaker products and both expansions at every
    sample point and record integrality and residue agreement."""
    validate_spec_pair(spec1, spec2)
    config = spec1.config
    _sqrt_check(config, sqrt_q, spec1.ground.q)
    reports = []
    for idx, point in enumerate(samples):
        w1 = whittaker_at(spec1, point, sqrt_q, target)
        w2 = whittaker_at(spec2, point, sqrt_q, target)
        f1 = mirabolic_expand(spec1, point, sqrt_q, target, cap)
        f2 = mirabolic_expand(spec2, point, sqrt_q, target, cap)
        w_cong = (min(w1.valuation(), w2.valuation()) >= 0
                  and _residues_agree(w1, w2))
        f_cong = (min(f1.valuation(), f2.valuation()) >= 0
                  and _residues_agree(f1, f2))
        reports.append(PointReport(idx, (w1, w2), (f1, f2), w_cong, f_cong))
    return PipelineReport(tuple(reports))


def default_sample_points(ground: GroundField, seed: int, count: int = 50,
                          max_place_degree: int = 2, a_bound: int = 2,
                          min_x_val: int = -1, central_bound: int = 1) -> tuple:
    """Deterministic sample points in Z(A)P(A): small supports over places
    of low degree, x components of valuation >= min_x_val, torus exponents
    within a_bound and central exponents within central_bound."""
    rng = random.Random(seed)
    places = list(enumerate_places(ground, max_place_degree))
    points = []
    attempts = 0
    while len(points) < count and attempts < 40 * count:
        attempts += 1
        k = rng.choice((1, 1, 2))
        chosen = rng.sample(places, k)
        entries = []
        for pl in chosen:
            K = pl.residue()
            v = rng.randint(min_x_val, 1)
            ncoef = rng.randint(1, 3)
            coeffs = tuple(K.from_int(rng.randrange(K.order)) for _ in range(ncoef))
            x = LocalElement.from_coeffs(pl, v, coeffs, exact=True)
            a1 = rng.randint(-a_bound, a_bound)
            entries.append((pl, x, a1, 0))
        central = []
        if rng.random() < 0.5:
            zp = rng.choice(places)
            c = rng.randint(-central_bound, central_bound)
            if c:
                central.append((zp, c))
        points.append(MirabolicPoint(ground, tuple(entries), tuple(central)))
    return tuple(points)


# ---------------------------------------------------------------------------
# central character propagation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharacterFamily:
    """A family of local characters: unramified values keyed by place
    degree away from S, explicit (possibly ramified) characters on listed
    places."""

    ground: GroundField
    config: FieldConfig
    S: tuple
    by_degree: tuple          # ((degree, LocalNumber))
    explicit: tuple = ()      # ((place, LocalCharacter))

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(sorted(self.S, key=lambda p: p.sort_key())))
        object.__setattr__(self, "by_degree", tuple(sorted(self.by_degree)))
        object.__setattr__(self, "explicit",
                           tuple(sorted(self.explicit, key=lambda kv: kv[0].sort_key())))

    def character_at(self, place: Place) -> LocalCharacter:
        for pl, chi in self.explicit:
            if pl == place:
                return chi
        if place in self.S:
            raise IncompleteData(f"no character supplied at exceptional place {place!r}")
        for deg, val in self.by_degree:
            if deg == place.degree:
                return LocalCharacter(val)
        raise IncompleteData(f"no character value for places of degree {place.degree}")

    def ramified_places(self) -> tuple:
        return tuple(pl for pl, chi in self.explicit if chi.level >= 1)


def _character_relevant_places(fam: CharacterFamily, y: RationalFunction):
    places = {pl for pl, _ in y.pole_places()} | {pl for pl, _ in y.zero_places()}
    inf = fam.ground.infinity()
    if y.ord_at(inf) != 0:
        places.add(inf)
    places |= set(fam.ramified_places())
    places |= set(fam.S)
    return sorted(places, key=lambda p: p.sort_key())


def character_product(fam: CharacterFamily, y: RationalFunction) -> LocalNumber:
    """prod over places of chi_v(y), exact; relevant places are the
    support of div(y) together with every ramified or exceptional place."""
    if y.is_zero:
        raise ValueError("characters are evaluated on nonzero elements")
    out = fam.config.one()
    for pl in _character_relevant_places(fam, y):
        chi = fam.character_at(pl)
        M = max(1, chi.level - int(y.ord_at(pl)) + 2)
        out = out * chi.evaluate(expand_at(y, pl, M))
    return out


@dataclass(frozen=True)
class RatioRecord:
    place: Place
    sample: str
    valuation_of_difference: object

    @property
    def ok(self) -> bool:
        return self.valuation_of_difference == INF or self.valuation_of_difference >= 1


@dataclass(frozen=True)
class CentralCharReport:
    product_failures: tuple
    ratio_records: tuple

    @property
    def ok(self) -> bool:
        return not self.product_failures and all(r.ok for r in self.ratio_records)


def central_char_propagate(fam1: CharacterFamily, fam2: CharacterFamily,
                           y_samples, unit_levels: int = 1) -> CentralCharReport:
    """Verify the product formula for both families on principal elements,
    then derive each exceptional-place ratio through a weak-approximation
    element and check it is 1 modulo the maximal ideal.

    The derivation: for x in k_w^x pick y in k^x with y = 1 to high order
    at the other exceptional places and y = x^{-1} to high order at w;
    then chi_w(x) equals the product of chi_v(y) over v outside S, which
    uses only the unramified data the two families share congruently.
    """
    if fam1.ground != fam2.ground or fam1.config != fam2.config:
        raise ConfigMismatch("families over different fields")
    if fam1.S != fam2.S:
        raise SpecMismatch("families have different exceptional sets")
    config = fam1.config

    product_failures = []
    for i, y in enumerate(y_samples):
        for tag, fam in (("chi1", fam1), ("chi2", fam2)):
            val = character_product(fam, y)
            if val != config.one():
                product_failures.append((i, tag))

    from .function_field import weak_approx

    ratio_records = []
    for w0 in fam1.S:
        levels = []
        for fam in (fam1, fam2):
            chi = fam.character_at(w0)
            levels.append(chi.level)
        m_w = max(max(levels), unit_levels, 1)
        test_elements = [LocalElement.uniformizer_power(w0, 1)]
        K = w0.residue()
        nonone = next((e for e in K.elements()
                       if not K.is_zero(e) and e != K.one), None)
        if nonone is not None:
            test_elements.append(LocalElement.from_coeffs(w0, 0, (nonone,), exact=True))
        for x in test_elements:
            constraints = []
            for v in fam1.S:
                h_v = max(max(fam1.character_at(v).level,
                              fam2.character_at(v).level), 1)
                if v == w0:
                    xv = int(x.valuation())
                    target = x.inverse(m_w + abs(xv) + 2)
                    constraints.append((v, target, -xv + m_w))
                else:
                    constraints.append((v, LocalElement.uniformizer_power(v, 0), h_v))
            y = weak_approx(constraints)
            r1 = _off_s_product(fam1, y)
            r2 = _off_s_product(fam2, y)
            ratio = r1 / r2
            diff = ratio - config.one()
            ratio_records.append(RatioRecord(w0, repr(x), diff.valuation()))
    return CentralCharReport(tuple(product_failures), tuple(ratio_records))


def _off_s_product(fam: CharacterFamily, y: RationalFunction) -> LocalNumber:
    out = fam.config.one()
    for pl in _character_relevant_places(fam, y):
        if pl in fam.S:
            continue
        chi = fam.character_at(pl)
        M = max(1, chi.level - int(y.ord_at(pl)) + 2)
        out = out * chi.evaluate(expand_at(y, pl, M))
    return out

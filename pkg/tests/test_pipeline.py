import pytest

from elladic.errors import (IncompleteData, NotCongruent, SpecMismatch,
                            UnsupportedPoint)
from elladic.function_field import (Divisor, GroundField, LocalElement,
                                    PsiTarget, quotient_index, rr_space,
                                    span_nonzero)
from elladic.padic import FieldConfig, sqrt_unit
from elladic.pipeline import (CharacterFamily, GlobalWhittakerSpec,
                              KirillovEntry, KirillovTable, LocalCharacter,
                              MirabolicPoint, TabulatedDatum, UnramifiedDatum,
                              central_char_propagate, character_product,
                              congruence_pipeline, default_sample_points,
                              fourier_coefficient, gamma_support,
                              invariance_divisor, local_value,
                              mirabolic_expand, validate_spec_pair,
                              whittaker_at)
from elladic.pipeline import _gamma_term
from elladic.satake import SatakeParam
from conftest import random_unit

G2 = GroundField(2)
CFG = FieldConfig(7, precision=12)


@pytest.fixture(scope="module")
def target():
    return PsiTarget.create(G2, CFG)


@pytest.fixture(scope="module")
def sqrt2():
    return sqrt_unit(CFG, 2)


def unramified_spec(rule_value=1):
    rule = tuple((d, (CFG.integer(rule_value), CFG.one())) for d in range(1, 13))
    return GlobalWhittakerSpec(G2, CFG, (), rule)


def basic_table(place, cfg=CFG):
    one_le = LocalElement.uniformizer_power(place, 0)
    return KirillovTable(place, (
        KirillovEntry(0, 1, one_le, cfg.one()),
        KirillovEntry(1, 0, one_le, cfg.integer(3)),
        KirillovEntry(-1, 1, one_le, cfg.integer(2)),
    ))


# -- tables and characters ----------------------------------------------------

def test_table_lookup_and_disjointness():
    pl = G2.place([0, 1])
    table = basic_table(pl)
    assert table.lookup(LocalElement.uniformizer_power(pl, 0)) == CFG.one()
    assert table.lookup(LocalElement.uniformizer_power(pl, 1)) == CFG.integer(3)
    assert table.lookup(LocalElement.uniformizer_power(pl, 5)).is_zero
    with pytest.raises(ValueError):
        KirillovTable(pl, (
            KirillovEntry(0, 0, LocalElement.uniformizer_power(pl, 0), CFG.one()),
            KirillovEntry(0, 1, LocalElement.uniformizer_power(pl, 0), CFG.one()),
        ))


def test_table_needs_enough_digits():
    pl = G2.place([0, 1])
    K = pl.residue()
    one_le = LocalElement.uniformizer_power(pl, 0)
    table = KirillovTable(pl, (KirillovEntry(0, 3, one_le, CFG.one()),))
    shallow = LocalElement.from_coeffs(pl, 0, (K.one,), exact=False)
    from elladic.errors import InsufficientPrecision
    with pytest.raises(InsufficientPrecision):
        table.lookup(shallow)


def test_local_character_evaluation():
    pl = G2.place([0, 1])
    chi = LocalCharacter(CFG.integer(3))
    x = LocalElement.uniformizer_power(pl, 2)
    assert chi.evaluate(x) == CFG.integer(9)
    quad = G2.place([1, 1, 1])
    K = quad.residue()
    ram = LocalCharacter(CFG.integer(3), 1, (((K.one,), CFG.one()),))
    assert ram.evaluate(LocalElement.uniformizer_power(quad, 1)) == CFG.integer(3)
    theta_unit = LocalElement.from_coeffs(quad, 0, (K.gen(),), exact=True)
    with pytest.raises(IncompleteData):
        ram.evaluate(theta_unit)


# -- local values -------------------------------------------------------------

def test_local_value_unramified(target):
    pl = G2.place([0, 1])
    S = SatakeParam(2, 2, (CFG.one(), CFG.one()))
    datum = UnramifiedDatum(S)
    x = LocalElement.exact_zero(pl)
    val, half = local_value(datum, pl, x, (0, 0), 0, target)
    assert val == CFG.one() and half == 0
    val, _ = local_value(datum, pl, x, (0, 1), 0, target)
    assert val.is_zero


def test_local_value_tabulated(target):
    pl = G2.place([0, 1])
    datum = TabulatedDatum(basic_table(pl), LocalCharacter(CFG.integer(3)))
    x = LocalElement.exact_zero(pl)
    val, half = local_value(datum, pl, x, (0, 0), 0, target)
    assert val == CFG.one() and half == 0
    val, _ = local_value(datum, pl, x, (1, 0), 0, target)
    assert val == CFG.integer(3)
    val, _ = local_value(datum, pl, x, (0, 0), 2, target)
    assert val == CFG.integer(9)
    with pytest.raises(UnsupportedPoint):
        local_value(datum, pl, x, (0, 1), 0, target)


# -- gamma support and the expansion -------------------------------------------

def test_gamma_support_identity(target):
    spec = unramified_spec()
    support = gamma_support(spec, MirabolicPoint(G2))
    assert len(support) == G2.q - 1


def test_gamma_support_grows_with_positive_exponent(target):
    spec = unramified_spec()
    pl = G2.place([0, 1])
    pt = MirabolicPoint(G2, ((pl, LocalElement.exact_zero(pl), 1, 0),))
    assert len(gamma_support(spec, pt)) == 2 ** 2 - 1


def test_gamma_support_empty_table(target):
    pl = G2.place([0, 1])
    datum = TabulatedDatum(KirillovTable(pl, ()), LocalCharacter(CFG.one()))
    spec = GlobalWhittakerSpec(
        G2, CFG, ((pl, datum),), tuple((d, (CFG.one(), CFG.one())) for d in range(1, 9)),
        w=pl)
    assert gamma_support(spec, MirabolicPoint(G2)) == ()


def test_mirabolic_identity_value(target, sqrt2):
    spec = unramified_spec()
    val = mirabolic_expand(spec, MirabolicPoint(G2), sqrt2, target)
    assert val == CFG.integer(G2.q - 1)


def test_mirabolic_identity_value_q3():
    g3 = GroundField(3)
    cfg = FieldConfig(7, d=2, precision=10)
    tgt = PsiTarget.create(g3, cfg)
    sq3 = sqrt_unit(cfg, 3)
    rule = tuple((d, (cfg.one(), cfg.one())) for d in range(1, 9))
    spec = GlobalWhittakerSpec(g3, cfg, (), rule)
    val = mirabolic_expand(spec, MirabolicPoint(g3), sq3, tgt)
    assert val == cfg.integer(2)


def test_zero_table_gives_zero_expansion(target, sqrt2):
    pl = G2.place([0, 1])
    datum = TabulatedDatum(KirillovTable(pl, ()), LocalCharacter(CFG.one()))
    spec = GlobalWhittakerSpec(
        G2, CFG, ((pl, datum),), tuple((d, (CFG.one(), CFG.one())) for d in range(1, 9)),
        w=pl)
    assert mirabolic_expand(spec, MirabolicPoint(G2), sqrt2, target).is_zero


def test_gamma_support_soundness(target):
    # every gamma outside the support yields a zero term
    spec = unramified_spec()
    pl = G2.place([0, 1])
    pt = MirabolicPoint(G2, ((pl, LocalElement.exact_zero(pl), 1, 0),))
    support = set(gamma_support(spec, pt))
    larger = Divisor.make(G2, [(pl, 2), (G2.infinity(), 1)])
    for gamma in span_nonzero(G2, rr_space(larger)):
        if gamma in support:
            continue
        coef, _ = _gamma_term(spec, pt, gamma, target)
        assert coef.is_zero


# -- Fourier duality -----------------------------------------------------------

def duality_case(spec, pt, target, sqrt_q, extra=None):
    cfg = spec.config
    U = invariance_divisor(spec, pt, extra=extra)
    support = gamma_support(spec, pt)

    def phi(p):
        return mirabolic_expand(spec, p, sqrt_q, target)

    for gamma in support:
        coef, half = _gamma_term(spec, pt, gamma, target)
        expected = coef * sqrt_q ** half if not coef.is_zero else coef
        got = fourier_coefficient(phi, gamma, pt, U, target, cfg)
        diff = got - expected
        assert diff.is_zero or diff.valuation() >= cfg.precision - 2
    return U


def test_fourier_duality_identity_point(target, sqrt2):
    spec = unramified_spec()
    duality_case(spec, MirabolicPoint(G2), target, sqrt2)


def test_fourier_duality_nontrivial_point(target, sqrt2):
    spec = unramified_spec()
    pl = G2.place([0, 1])
    K = pl.residue()
    x = LocalElement.from_coeffs(pl, -1, (K.one,), exact=True)
    pt = MirabolicPoint(G2, ((pl, x, 1, 0),))
    duality_case(spec, pt, target, sqrt2)


def test_fourier_of_gamma_outside_support_vanishes(target, sqrt2):
    spec = unramified_spec()
    pt = MirabolicPoint(G2)
    support = set(gamma_support(spec, pt))
    pl = G2.place([0, 1])
    larger = Divisor.make(G2, [(pl, 1), (G2.infinity(), 1)])
    U = invariance_divisor(spec, pt, extra=larger)

    def phi(p):
        return mirabolic_expand(spec, p, sqrt2, target)

    outside = [g for g in span_nonzero(G2, rr_space(larger)) if g not in support]
    assert outside
    for gamma in outside[:4]:
        assert fourier_coefficient(phi, gamma, pt, U, target, CFG).is_zero


def test_averaging_denominator_is_p_power():
    pl = G2.place([0, 1])
    U = Divisor.make(G2, [(pl, 3), (G2.infinity(), 2)])
    idx = quotient_index(U)
    while idx % G2.p == 0:
        idx //= G2.p
    assert idx == 1


# -- the end-to-end pipeline ---------------------------------------------------

def build_spec_pair(rng, n_perturbed=2):
    s1_pl, s2_pl = G2.place([1, 1]), G2.place([1, 1, 1])
    tab1 = TabulatedDatum(basic_table(s1_pl), LocalCharacter(CFG.integer(3)))
    tab2 = TabulatedDatum(basic_table(s2_pl), LocalCharacter(CFG.integer(5)))
    places1 = [(s1_pl, tab1), (s2_pl, tab2)]
    places2 = [(s1_pl, tab1), (s2_pl, tab2)]
    perturb_at = [G2.place([0, 1]), G2.infinity(), G2.place([1, 1, 0, 1])][:n_perturbed]
    ell = CFG.integer(7)
    for pl in perturb_at:
        mu = (random_unit(CFG, rng), random_unit(CFG, rng))
        pert = tuple(m * (CFG.one() + ell * random_unit(CFG, rng)) for m in mu)
        places1.append((pl, UnramifiedDatum(SatakeParam(2, 2 ** pl.degree, mu))))
        places2.append((pl, UnramifiedDatum(SatakeParam(2, 2 ** pl.degree, (pert[1], pert[0])))))
    rule1 = tuple((d, (random_unit(CFG, rng), random_unit(CFG, rng))) for d in range(1, 13))
    rule2 = tuple((d, (m1 * (CFG.one() + ell * random_unit(CFG, rng)),
                       m2 * (CFG.one() + ell * random_unit(CFG, rng))))
                  for (d, (m1, m2)) in rule1)
    spec1 = GlobalWhittakerSpec(G2, CFG, tuple(places1), rule1, w=s1_pl)
    spec2 = GlobalWhittakerSpec(G2, CFG, tuple(places2), rule2, w=s1_pl)
    return spec1, spec2


def test_pipeline_congruence(rng, target, sqrt2):
    spec1, spec2 = build_spec_pair(rng)
    samples = default_sample_points(G2, seed=3, count=8)
    rep = congruence_pipeline(spec1, spec2, samples, sqrt2, target)
    assert rep.ok
    d = rep.to_dict()
    assert d["ok"] and len(d["points"]) == 8


def test_pipeline_identical_specs(rng, target, sqrt2):
    spec1, _ = build_spec_pair(rng)
    samples = default_sample_points(G2, seed=5, count=4)
    rep = congruence_pipeline(spec1, spec1, samples, sqrt2, target)
    assert rep.ok
    for point in samples:
        w1 = whittaker_at(spec1, point, sqrt2, target)
        w2 = whittaker_at(spec1, point, sqrt2, target)
        assert (w1 - w2).is_zero


def test_pipeline_rejects_table_mismatch(rng, target, sqrt2):
    spec1, spec2 = build_spec_pair(rng)
    s1_pl = G2.place([1, 1])
    other = TabulatedDatum(basic_table(s1_pl), LocalCharacter(CFG.integer(6)))
    tampered = GlobalWhittakerSpec(
        G2, CFG,
        tuple((pl, other if pl == s1_pl else d) for pl, d in spec2.explicit),
        spec2.default_rule, w=spec2.w)
    with pytest.raises(SpecMismatch):
        validate_spec_pair(spec1, tampered)


def test_pipeline_rejects_noncongruent_data(rng, target, sqrt2):
    spec1, spec2 = build_spec_pair(rng)
    t_pl = G2.place([0, 1])
    bad_datum = UnramifiedDatum(SatakeParam(2, 2, (CFG.integer(1), CFG.integer(2))))
    tampered = GlobalWhittakerSpec(
        G2, CFG,
        tuple((pl, bad_datum if pl == t_pl else d) for pl, d in spec2.explicit),
        spec2.default_rule, w=spec2.w)
    with pytest.raises(NotCongruent):
        validate_spec_pair(spec1, tampered)


def test_spec_requires_normalized_tables():
    pl = G2.place([1, 1])
    one_le = LocalElement.uniformizer_power(pl, 0)
    bad_table = KirillovTable(pl, (KirillovEntry(0, 1, one_le, CFG.integer(2)),))
    with pytest.raises(ValueError):
        GlobalWhittakerSpec(
            G2, CFG, ((pl, TabulatedDatum(bad_table, LocalCharacter(CFG.one()))),),
            ((1, (CFG.one(), CFG.one())),))


def test_spec_default_rule_missing_degree():
    spec = GlobalWhittakerSpec(G2, CFG, (), ((1, (CFG.one(), CFG.one())),))
    with pytest.raises(IncompleteData):
        spec.datum_at(G2.place([1, 1, 1]))


# -- central characters ---------------------------------------------------------

def norm_family(c_num, c_den, S_places):
    value = lambda d: CFG.rational(c_num ** d, c_den ** d)
    return CharacterFamily(
        G2, CFG, S_places,
        tuple((d, value(d)) for d in range(1, 9)),
        tuple((pl, LocalCharacter(value(pl.degree))) for pl in S_places))


def test_character_product_formula(rng):
    s_places = (G2.place([1, 1]),)
    fam = norm_family(1, 2, s_places)
    for _ in range(10):
        num = [rng.randrange(2) for _ in range(rng.randrange(1, 5))] + [1]
        den = [rng.randrange(2) for _ in range(rng.randrange(1, 5))] + [1]
        y = G2.rational(num, den)
        if y.is_zero:
            continue
        assert character_product(fam, y) == CFG.one()


def test_central_char_propagation(rng):
    s_places = (G2.place([1, 1]),)
    fam1 = norm_family(1, 2, s_places)
    fam2 = norm_family(8, 16, s_places)  # 8/16 = 1/2 scaled: same character
    ys = []
    while len(ys) < 10:
        num = [rng.randrange(2) for _ in range(rng.randrange(1, 5))] + [1]
        den = [rng.randrange(2) for _ in range(rng.randrange(1, 5))] + [1]
        y = G2.rational(num, den)
        if not y.is_zero:
            ys.append(y)
    rep = central_char_propagate(fam1, fam2, ys)
    assert rep.ok


def test_central_char_congruent_distinct_families(rng):
    s_places = (G2.place([1, 1]), G2.place([0, 1]))
    fam1 = norm_family(3, 1, s_places)
    fam2 = norm_family(10, 1, s_places)  # 10 = 3 + 7: congruent mod 7
    ys = [G2.t(), G2.rational([1, 1]), G2.rational([1], [0, 1])]
    rep = central_char_propagate(fam1, fam2, ys)
    assert rep.ok


def test_central_char_flags_noncongruent(rng):
    s_places = (G2.place([1, 1]),)
    fam1 = norm_family(1, 2, s_places)
    fam2 = norm_family(1, 1, s_places)
    rep = central_char_propagate(fam1, fam2, [G2.t()])
    assert not rep.ok


def test_central_char_incomplete_data():
    s_places = (G2.place([1, 1]),)
    fam = CharacterFamily(G2, CFG, s_places, ((1, CFG.one()),),
                          ((s_places[0], LocalCharacter(CFG.one())),))
    with pytest.raises(IncompleteData):
        character_product(fam, G2.rational([1, 1, 1]))  # needs degree 2 data


def test_default_sample_points_deterministic():
    a = default_sample_points(G2, seed=9, count=10)
    b = default_sample_points(G2, seed=9, count=10)
    assert a == b
    assert len(a) == 10
    for pt in a:
        for _, x, _, a2 in pt.entries:
            assert a2 == 0

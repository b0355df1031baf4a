import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elladic.errors import (ConfigMismatch, NoSimpleRoot, NotIntegral,
                            PrecisionLoss, UnsupportedDegree)
from elladic.padic import (FieldConfig, canonical_compare, congruent_mod_m,
                           hensel_root, pth_roots_of_unity, sqrt_unit)

CFG5 = FieldConfig(5, precision=4)
CFG7 = FieldConfig(7, precision=8)


def test_add_carries_into_valuation():
    s = CFG5.integer(7) + CFG5.integer(3)
    assert s.v == 1 and s.coeffs == (2,)


def test_mul_adds_valuations():
    x = CFG5.unit(2, (2,))
    y = CFG5.unit(-1, (3,))
    assert (x * y).v == 1 and (x * y).coeffs == (6,)


def test_sub_self_is_exact_zero():
    x = CFG5.unit(0, (7,))
    assert (x - x).is_zero
    assert (x + (-x)).is_zero


def test_valuation_cases():
    assert CFG5.unit(3, (2,)).valuation() == 3
    assert CFG5.zero().valuation() == math.inf
    assert CFG5.integer(5).inv().valuation() == -1


def test_reduce_examples():
    assert CFG5.integer(10).reduce().coeffs == (0,)
    assert CFG5.integer(7).reduce().coeffs == (2,)
    with pytest.raises(NotIntegral):
        CFG5.ell_power(-1).reduce()


def test_reduce_is_ring_homomorphism(rng):
    for _ in range(100):
        x = CFG7.integer(rng.randrange(1, 7 ** 6))
        y = CFG7.integer(rng.randrange(1, 7 ** 6))
        assert (x + y).reduce() == x.reduce() + y.reduce()
        assert (x * y).reduce() == x.reduce() * y.reduce()


def test_unit_times_inverse_reduces_to_one(rng):
    for _ in range(50):
        x = CFG7.unit(0, (rng.randrange(1, 7),))
        assert (x * x.inv()).reduce() == CFG7.one().reduce()


def test_identical_reduced_precision_copies_cancel_structurally():
    a = CFG5.unit(0, (1,), prec=2)
    b = CFG5.unit(0, (1,), prec=2)
    assert (a - b).is_zero


def test_full_cancellation_across_precisions_raises():
    # same certified digits but different precision records: the values
    # agree modulo 5^2 yet nothing certifies the difference nonzero
    a = CFG5.unit(0, (1,), prec=2)
    b = CFG5.unit(0, (1 + 25,), prec=4)
    with pytest.raises(PrecisionLoss):
        a - b


def test_config_mismatch_rejected():
    with pytest.raises(ConfigMismatch):
        CFG5.one() + CFG7.one()


def test_cross_precision_add_keeps_certified_digits():
    # valuation-5 value known to 8 digits plus a unit known to 8 digits:
    # the sum keeps 8 digits of absolute precision at valuation 0
    x = CFG7.unit(0, (3,))
    y = CFG7.unit(5, (2,))
    s = x + y
    assert s.v == 0
    assert s.prec == 8


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5 ** 4 // 3), st.integers(1, 5 ** 4 // 3), st.integers(1, 5 ** 4 // 3))
def test_ring_axioms_on_exact_integers(a, b, c):
    # bounded so every intermediate sum stays below ell^N and is therefore
    # exactly representable; all identities are then exact
    A, B, C = CFG5.integer(a), CFG5.integer(b), CFG5.integer(c)
    assert (A + B) + C == A + (B + C)
    assert A * B == B * A
    assert A * (B + C) == A * B + A * C
    assert A * (B * C) == (A * B) * C


def test_sum_hitting_the_cap_raises_cleanly():
    # 1 + 234 + 390 = 5^4: the true value needs five absolute digits but
    # the inputs certify only four, so no digit of the result is provable
    with pytest.raises(PrecisionLoss):
        (CFG5.integer(1) + CFG5.integer(234)) + CFG5.integer(390)


@settings(max_examples=100, deadline=None)
@given(st.integers(-10 ** 9, 10 ** 9), st.integers(-10 ** 9, 10 ** 9))
def test_integer_embedding_is_multiplicative(a, b):
    if a and b:
        assert CFG7.integer(a) * CFG7.integer(b) == CFG7.integer(a * b)


def test_valuation_additivity(rng):
    for _ in range(100):
        x = CFG7.unit(rng.randrange(-5, 6), (rng.randrange(1, 7),))
        y = CFG7.unit(rng.randrange(-5, 6), (rng.randrange(1, 7),))
        assert (x * y).valuation() == x.valuation() + y.valuation()


def test_rational_constructor():
    x = CFG7.rational(1, 3)
    assert (x * CFG7.integer(3) - CFG7.one()).is_zero
    assert CFG7.rational(7, 3).v == 1
    assert CFG7.rational(3, 49).v == -2


# -- Hensel lifting ----------------------------------------------------------

def test_hensel_sqrt2_mod7():
    f = [CFG7.integer(-2), CFG7.zero(), CFG7.one()]
    root = hensel_root(f, CFG7.residue(3))
    assert root.coeffs[0] % 49 == 10
    # independent check on integer lifts: root^2 = 2 mod 7^N
    assert (root.coeffs[0] ** 2 - 2) % 7 ** 8 == 0


def test_hensel_linear_returns_constant():
    c = CFG7.integer(23)
    f = [-c, CFG7.one()]
    root = hensel_root(f, c.reduce())
    assert root == c


def test_hensel_rejects_non_simple_root():
    f = [CFG7.zero(), CFG7.zero(), CFG7.one()]  # X^2
    with pytest.raises(NoSimpleRoot):
        hensel_root(f, CFG7.residue(0))
    with pytest.raises(NoSimpleRoot):
        hensel_root([CFG7.integer(-2), CFG7.zero(), CFG7.one()], CFG7.residue(1))


def test_hensel_root_kills_polynomial_to_precision(rng):
    for _ in range(10):
        c = CFG7.unit(0, (rng.randrange(1, 7),))
        # f = (X - c)(X - c - 1) has simple roots
        one = CFG7.one()
        f = [c * (c + one), -(c + c + one), one]
        root = hensel_root(f, c.reduce())
        value = (root - c) * (root - c - one)
        assert value.is_zero or value.valuation() >= CFG7.precision


def test_pth_roots_of_unity():
    roots = pth_roots_of_unity(CFG7, 2)
    assert sorted(r.coeffs[0] % 7 for r in roots) == [1, 6]
    cubics = pth_roots_of_unity(CFG7, 3)
    assert sorted(r.reduce().coeffs[0] for r in cubics) == [1, 2, 4]
    for r in cubics:
        assert (r ** 3 - CFG7.one()).is_zero
    # closure under multiplication
    residues = {r.reduce() for r in cubics}
    for a in cubics:
        for b in cubics:
            assert (a * b).reduce() in residues


def test_pth_roots_unsupported_degree():
    with pytest.raises(UnsupportedDegree):
        pth_roots_of_unity(CFG7, 7)
    with pytest.raises(UnsupportedDegree):
        pth_roots_of_unity(FieldConfig(3, precision=6), 7)  # 7 does not divide 3^1 - 1


def test_pth_roots_in_extension():
    cfg = FieldConfig(3, d=2, precision=6)  # 7 does not divide 8... use p=2: 2 | 9-1
    roots = pth_roots_of_unity(cfg, 2)
    assert len(roots) == 2
    cfg5 = FieldConfig(5, d=2, precision=6)  # 3 | 24
    roots3 = pth_roots_of_unity(cfg5, 3)
    assert len(roots3) == 3
    for r in roots3:
        assert (r ** 3 - cfg5.one()).is_zero


def test_canonical_compare_orders_residues():
    a, b = CFG5.residue(0), CFG5.residue(1)
    assert canonical_compare(a, b) == -1
    assert canonical_compare(b, b) == 0
    rs = [CFG5.residue(2), CFG5.residue(0), CFG5.residue(1)]
    assert sorted(rs) == [CFG5.residue(0), CFG5.residue(1), CFG5.residue(2)]
    with pytest.raises(ConfigMismatch):
        canonical_compare(CFG5.residue(0), CFG7.residue(0))


def test_congruent_mod_m_helper():
    assert congruent_mod_m(CFG7.integer(3), CFG7.integer(10))
    assert not congruent_mod_m(CFG7.integer(3), CFG7.integer(4))
    with pytest.raises(NotIntegral):
        congruent_mod_m(CFG7.ell_power(-1), CFG7.one())


def test_sqrt_unit():
    cfg = FieldConfig(11, precision=6)
    r = sqrt_unit(cfg, 3)
    assert (r * r - cfg.integer(3)).is_zero
    with pytest.raises(UnsupportedDegree):
        sqrt_unit(FieldConfig(2, precision=6), 17)
    with pytest.raises(UnsupportedDegree):
        sqrt_unit(FieldConfig(7, precision=6), 3)  # 3 is not a square mod 7
    r2 = sqrt_unit(FieldConfig(7, d=2, precision=6), 3)
    assert (r2 * r2 - FieldConfig(7, d=2, precision=6).integer(3)).is_zero


def test_serialization_digit_vectors_roundtrip():
    cfg = FieldConfig(3, d=2, precision=5)
    x = cfg.unit(-2, (7, 5))
    vecs = x.digit_vectors()
    assert len(vecs) == 5 and all(len(v) == 2 for v in vecs)
    rebuilt = [0, 0]
    scale = 1
    for vec in vecs:
        for j, digit in enumerate(vec):
            rebuilt[j] += digit * scale
        scale *= 3
    assert tuple(rebuilt) == x.coeffs

"""JSON encoding and decoding for every CLI-facing object.

One schema (version tag "elladic/1"), shared by input files and reports.
Field elements of F_q and of residue fields are coded as integers below
the field order (base-p digit vectors read as an integer); local numbers
accept three input shorthands (integer, [num, den] rational, full digit
record) and are always emitted as the full record.
"""

from __future__ import annotations

from .errors import InputError
from .function_field import (Adele, Divisor, GroundField, LocalElement,
                             Place, RationalFunction)
from .padic import FieldConfig, LocalNumber
from .pipeline import (CharacterFamily, GlobalWhittakerSpec, KirillovEntry,
                       KirillovTable, LocalCharacter, MirabolicPoint,
                       TabulatedDatum, UnramifiedDatum)
from .satake import CharPoly, SatakeParam
from .whittaker import WhittakerValue

SCHEMA = "elladic/1"


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise InputError(f"missing '{key}' in {where}")
    return obj[key]


# -- coefficient field -------------------------------------------------------

def decode_field_config(obj) -> FieldConfig:
    if not isinstance(obj, dict):
        raise InputError("field config must be an object")
    modulus = obj.get("modulus_coeffs", obj.get("modulus"))
    try:
        return FieldConfig(
            ell=int(_need(obj, "ell", "field config")),
            d=int(obj.get("d", 1)),
            modulus=tuple(modulus) if modulus is not None else None,
            precision=int(obj.get("precision", 32)),
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def encode_field_config(cfg: FieldConfig) -> dict:
    return {"ell": cfg.ell, "d": cfg.d, "modulus_coeffs": list(cfg.modulus),
            "precision": cfg.precision}


def decode_local_number(obj, cfg: FieldConfig) -> LocalNumber:
    if isinstance(obj, bool):
        raise InputError("booleans are not field elements")
    if isinstance(obj, int):
        return cfg.integer(obj)
    if isinstance(obj, list):
        if len(obj) != 2 or not all(isinstance(x, int) for x in obj):
            raise InputError("rational shorthand must be [numerator, denominator]")
        return cfg.rational(obj[0], obj[1])
    if isinstance(obj, dict):
        if obj.get("zero"):
            return cfg.zero()
        v = int(_need(obj, "valuation", "local number"))
        digits = _need(obj, "unit_digits", "local number")
        if not digits:
            raise InputError("nonzero local number needs at least one digit vector")
        coeffs = [0] * cfg.d
        scale = 1
        for vec in digits:
            if len(vec) != cfg.d:
                raise InputError(f"digit vectors must have length d = {cfg.d}")
            for j, digit in enumerate(vec):
                if not 0 <= int(digit) < cfg.ell:
                    raise InputError("digits must lie in [0, ell)")
                coeffs[j] += int(digit) * scale
            scale *= cfg.ell
        prec = min(len(digits), cfg.precision)
        try:
            return cfg.unit(v, coeffs, prec=prec)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    raise InputError(f"cannot read a local number from {obj!r}")


def encode_local_number(x: LocalNumber) -> dict:
    if x.is_zero:
        return {"zero": True}
    return {"valuation": x.v, "unit_digits": x.digit_vectors(),
            "precision": x.prec}


# -- satake ------------------------------------------------------------------

def decode_satake(obj, cfg: FieldConfig) -> SatakeParam:
    if not isinstance(obj, dict):
        raise InputError("satake parameter must be an object")
    mu = [decode_local_number(m, cfg) for m in _need(obj, "mu", "satake parameter")]
    n = int(obj.get("n", len(mu)))
    try:
        return SatakeParam(n, int(_need(obj, "q", "satake parameter")), tuple(mu))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def encode_satake(S: SatakeParam) -> dict:
    return {"n": S.n, "q": S.q, "mu": [encode_local_number(m) for m in S.mu]}


def encode_char_poly(P: CharPoly) -> dict:
    return {"coeffs": [encode_local_number(c) for c in P.coeffs]}


def encode_residue_poly(res) -> list:
    return [list(r.coeffs) for r in res]


def encode_whittaker_value(w: WhittakerValue) -> dict:
    return {"coef": encode_local_number(w.coef), "q_half_exp": w.q_half_exp}


# -- ground field and places -------------------------------------------------

def decode_ground(obj) -> GroundField:
    if not isinstance(obj, dict):
        raise InputError("ground field must be an object")
    try:
        return GroundField(
            p=int(_need(obj, "p", "ground field")),
            f=int(obj.get("f", 1)),
            modulus=tuple(obj["modulus"]) if "modulus" in obj else None,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def encode_ground(g: GroundField) -> dict:
    return {"p": g.p, "f": g.f, "modulus": list(g.modulus)}


def decode_place(obj, ground: GroundField) -> Place:
    if isinstance(obj, dict):
        if obj.get("infinity"):
            return ground.infinity()
        if "finite" in obj:
            try:
                return ground.place([int(c) for c in obj["finite"]])
            except ValueError as exc:
                raise InputError(str(exc)) from exc
    raise InputError(f"cannot read a place from {obj!r}")


def encode_place(pl: Place) -> dict:
    if pl.is_infinity:
        return {"infinity": True}
    F = pl.ground.field()
    return {"finite": [F.to_int(c) for c in pl.poly]}


def decode_rational(obj, ground: GroundField) -> RationalFunction:
    if isinstance(obj, list):
        return ground.rational([int(c) for c in obj])
    if isinstance(obj, dict):
        num = [int(c) for c in _need(obj, "num", "rational function")]
        den = [int(c) for c in obj.get("den", [1])]
        try:
            return ground.rational(num, den)
        except ZeroDivisionError as exc:
            raise InputError(str(exc)) from exc
    raise InputError(f"cannot read a rational function from {obj!r}")


def encode_rational(r: RationalFunction) -> dict:
    F = r.ground.field()
    return {"num": [F.to_int(c) for c in r.num],
            "den": [F.to_int(c) for c in r.den]}


def decode_divisor(obj, ground: GroundField) -> Divisor:
    if not isinstance(obj, list):
        raise InputError("divisor must be a list of [place, multiplicity] pairs")
    pairs = []
    for item in obj:
        if not isinstance(item, list) or len(item) != 2:
            raise InputError("divisor entries are [place, multiplicity]")
        pairs.append((decode_place(item[0], ground), int(item[1])))
    return Divisor.make(ground, pairs)


def encode_divisor(D: Divisor) -> list:
    return [[encode_place(pl), m] for pl, m in D.items]


def decode_local_element(obj, ground: GroundField) -> LocalElement:
    if not isinstance(obj, dict):
        raise InputError("local element must be an object")
    place = decode_place(_need(obj, "place", "local element"), ground)
    K = place.residue()
    coeffs = tuple(K.from_int(int(c)) for c in obj.get("coeffs", []))
    return LocalElement.from_coeffs(place, int(obj.get("v", 0)), coeffs,
                                    exact=bool(obj.get("exact", True)))


def encode_local_element(x: LocalElement) -> dict:
    K = x.place.residue()
    return {"place": encode_place(x.place), "v": x.v,
            "coeffs": [K.to_int(c) for c in x.coeffs],
            "exact": x.exact_tail}


def encode_adele(a: Adele) -> list:
    return [[encode_place(pl), encode_local_element(x)] for pl, x in a.items]


# -- global specifications ---------------------------------------------------

def decode_local_character(obj, cfg: FieldConfig, place: Place) -> LocalCharacter:
    if not isinstance(obj, dict):
        raise InputError("local character must be an object")
    val = decode_local_number(_need(obj, "uniformizer_value", "local character"), cfg)
    level = int(obj.get("level", 0))
    unit_values = []
    K = place.residue()
    for key_codes, value in obj.get("unit_values", []):
        key = tuple(K.from_int(int(c)) for c in key_codes)
        unit_values.append((key, decode_local_number(value, cfg)))
    try:
        return LocalCharacter(val, level, tuple(unit_values))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def decode_kirillov_table(obj, cfg: FieldConfig, place: Place) -> KirillovTable:
    entries = []
    for e in obj:
        rep_codes = e.get("rep", [1])
        K = place.residue()
        rep = LocalElement.from_coeffs(
            place, 0, tuple(K.from_int(int(c)) for c in rep_codes), exact=True)
        try:
            entries.append(KirillovEntry(int(_need(e, "j", "table entry")),
                                         int(e.get("level", 0)), rep,
                                         decode_local_number(_need(e, "value", "table entry"), cfg)))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    try:
        return KirillovTable(place, tuple(entries))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def decode_spec(obj, ground: GroundField, cfg: FieldConfig) -> GlobalWhittakerSpec:
    if not isinstance(obj, dict):
        raise InputError("specification must be an object")
    explicit = []
    for rec in obj.get("places", []):
        place = decode_place(_need(rec, "place", "spec place record"), ground)
        datum = _need(rec, "datum", "spec place record")
        if "unramified" in datum:
            S = decode_satake(datum["unramified"], cfg)
            explicit.append((place, UnramifiedDatum(S)))
        elif "table" in datum:
            table = decode_kirillov_table(datum["table"], cfg, place)
            central = decode_local_character(
                _need(datum, "central", "tabulated datum"), cfg, place)
            explicit.append((place, TabulatedDatum(table, central)))
        else:
            raise InputError("datum must contain 'unramified' or 'table'")
    rule = []
    for deg, pair in obj.get("default_rule", {}).items():
        if len(pair) != 2:
            raise InputError("default rule entries are pairs")
        rule.append((int(deg), tuple(decode_local_number(m, cfg) for m in pair)))
    w = decode_place(obj["w"], ground) if obj.get("w") else None
    try:
        spec = GlobalWhittakerSpec(ground, cfg, tuple(explicit), tuple(rule), w)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    if "S" in obj:
        declared = {decode_place(pl, ground) for pl in obj["S"]}
        if declared != set(spec.S):
            raise InputError("declared exceptional set S does not match the tabulated places")
    return spec


def decode_point(obj, ground: GroundField) -> MirabolicPoint:
    entries = []
    for rec in obj.get("entries", []):
        place = decode_place(_need(rec, "place", "point entry"), ground)
        x = (decode_local_element(rec["x"], ground) if "x" in rec
             else LocalElement.exact_zero(place))
        if x.place != place:
            raise InputError("point x-component at the wrong place")
        a = rec.get("a", [0, 0])
        if len(a) != 2:
            raise InputError("torus exponents are a pair")
        entries.append((place, x, int(a[0]), int(a[1])))
    central = [(decode_place(pl, ground), int(c)) for pl, c in obj.get("central", [])]
    try:
        return MirabolicPoint(ground, tuple(entries), tuple(central))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def decode_character_family(obj, ground: GroundField, cfg: FieldConfig) -> CharacterFamily:
    S = tuple(decode_place(pl, ground) for pl in obj.get("S", []))
    by_degree = tuple((int(d), decode_local_number(v, cfg))
                      for d, v in obj.get("by_degree", {}).items())
    explicit = []
    for rec in obj.get("explicit", []):
        place = decode_place(_need(rec, "place", "character record"), ground)
        explicit.append((place,
                         decode_local_character(_need(rec, "character", "character record"),
                                                cfg, place)))
    return CharacterFamily(ground, cfg, S, by_degree, tuple(explicit))

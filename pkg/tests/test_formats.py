import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corel.enumeration import OversizeError, candidate_count, enumerate_homs
from corel.errors import DimensionError
from corel.finset import FinFn, FinSetEngine, PartialFn, PartialFnEngine, Partition
from corel.jsonio import (
    FormatError,
    decode_lattice,
    decode_morphism,
    decode_partition,
    dumps,
    encode_lattice,
    encode_morphism,
    encode_partition,
    engine_from_flag,
    engine_from_header,
    engine_header,
)
from corel.lattice import BUILTIN_LATTICES, FiniteLattice, builtin_lattice
from corel.linalg import QQ, ZZ, Matrix, PrimeField
from corel.linear import LinearEngine
from corel.pid import ZEngine

# --- engines and morphisms -------------------------------------------------


@pytest.mark.parametrize("flag", ["finset", "pf", "linq", "linfp:2", "linfp:7", "z"])
def test_engine_header_round_trip(flag):
    e = engine_from_flag(flag)
    assert engine_from_header(engine_header(e)) == e


def test_engine_flag_errors():
    for bad in ["linfp:4", "linfp:x", "R", ""]:
        with pytest.raises(FormatError):
            engine_from_flag(bad)
    assert engine_from_flag("finset", "F").a_class == "C"
    with pytest.raises(FormatError):
        engine_from_header({"field": "Fp"})
    with pytest.raises(FormatError):
        engine_from_header({"ring": "Q"})
    assert engine_from_header({}) is None


@given(st.lists(st.integers(0, 4), max_size=5))
def test_finite_function_round_trip(table):
    f = FinFn.of(table, 5)
    assert decode_morphism(FinSetEngine(), json.loads(json.dumps(encode_morphism(f)))) == f


@given(st.lists(st.one_of(st.none(), st.integers(0, 2)), max_size=4))
def test_partial_function_round_trip(table):
    f = PartialFn.of(table, 3)
    assert decode_morphism(PartialFnEngine(), encode_morphism(f)) == f


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_rational_matrix_round_trip(rows, cols, data):
    M = Matrix.of(QQ, [[data.draw(fractions) for _ in range(cols)] for _ in range(rows)], cols=cols)
    enc = json.loads(dumps(encode_morphism(M)))
    assert decode_morphism(LinearEngine(), enc) == M


def test_matrix_decoding_errors():
    Z = ZEngine()
    with pytest.raises(DimensionError):
        decode_morphism(Z, {"dom": 2, "cod": 1, "matrix": [[1]]})
    with pytest.raises(FormatError):
        decode_morphism(Z, {"dom": 1, "cod": 1, "matrix": [[True]]})
    with pytest.raises(FormatError):
        decode_morphism(Z, {"dom": 1, "cod": 1, "matrix": [["1/2"]]})
    with pytest.raises(FormatError):
        decode_morphism(LinearEngine(), {"dom": -1, "cod": 1, "matrix": []})
    with pytest.raises(DimensionError):
        decode_morphism(FinSetEngine(), {"dom": 1, "cod": 1, "table": [3]})
    assert decode_morphism(LinearEngine(PrimeField(3)), {"dom": 1, "cod": 1, "matrix": [[4]]}) == Matrix.of(
        PrimeField(3), [[1]]
    )


def test_partition_round_trip():
    p = Partition.from_blocks(2, 1, [["x0", "y0"], ["x1"]])
    assert decode_partition(encode_partition(p)) == p
    with pytest.raises(FormatError):
        decode_partition({"n": 1, "m": 1, "blocks": [0]})


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1, 2]}) == dumps({"a": [1, 2], "b": 1})
    assert dumps({}).endswith("\n")


# --- enumeration -----------------------------------------------------------


def test_candidate_count_and_guard():
    F = FinSetEngine()
    assert candidate_count(F, 1, 1, "corel") == 4
    with pytest.raises(OversizeError):
        enumerate_homs(F, 2, 2, "rel", limit=3)
    with pytest.raises(OversizeError):
        candidate_count(LinearEngine(), 1, 1, "rel")
    with pytest.raises(ValueError):
        candidate_count(F, 1, 1, "spans")


def test_enumerated_hom_sets_have_no_duplicates():
    for engine in (FinSetEngine(), PartialFnEngine(), LinearEngine(PrimeField(2))):
        for kind in ("corel", "rel"):
            items = enumerate_homs(engine, 1, 1, kind)
            assert len(items) == len(set(items))


# --- lattices --------------------------------------------------------------


def test_builtin_lattices_decode_and_round_trip():
    for name in BUILTIN_LATTICES:
        L = builtin_lattice(name)
        assert decode_lattice(encode_lattice(L)) == L
    with pytest.raises(ValueError):
        builtin_lattice("pentagon-ish")


def test_not_a_lattice_is_rejected():
    # two incomparable maxima over a common bottom have no join
    with pytest.raises(FormatError):
        decode_lattice({"size": 3, "covers": [[0, 1], [0, 2]]})
    with pytest.raises(FormatError):
        decode_lattice({"size": 2, "covers": [[0, 5]]})
    with pytest.raises(FormatError):
        decode_lattice({"sum": []})


def test_chain_join_meet_and_homs():
    L = FiniteLattice.chain(3)
    assert L.join(0, 2) == 2 and L.meet(0, 2) == 0
    assert L.cospan_hom(0, 1) == L.upper_set(1) == [1, 2]
    assert L.span_hom(1, 2) == L.lower_set(1) == [0, 1]
    for a, b in itertools.product(range(3), repeat=2):
        assert len(L.corel_hom(a, b)) == 1


def test_diamond_has_incomparable_atoms():
    D = FiniteLattice.diamond()
    bot, a, b, top = 0, 1, 2, 3
    assert D.join(a, b) == top and D.meet(a, b) == bot
    assert D.gamma(a, top, b) == (a, top, b)


def test_coproduct_separates_components():
    L = FiniteLattice.chain(2).coproduct(FiniteLattice.diamond())
    assert L.size == 6
    comp = L.components()
    assert len(set(comp)) == 2
    for x, y in itertools.product(range(L.size), repeat=2):
        same = comp[x] == comp[y]
        assert len(L.corel_hom(x, y)) == (1 if same else 0)
        if not same:
            assert L.join(x, y) is None and L.cospan_hom(x, y) == []


def test_lattice_file_formats_agree():
    by_covers = decode_lattice({"size": 4, "covers": [[0, 1], [0, 2], [1, 3], [2, 3]]})
    leq = [[int(by_covers.leq[i][j]) for j in range(4)] for i in range(4)]
    assert decode_lattice({"size": 4, "leq": leq}) == by_covers
    summed = decode_lattice({"sum": [{"size": 1}, {"size": 1}]})
    assert summed == builtin_lattice("two-points")

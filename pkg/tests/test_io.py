import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ibltransfer import io
from ibltransfer.complexes import ChainComplex, Contraction, homology_contraction
from ibltransfer.generators import random_map, random_strict_ibl
from ibltransfer.graphs import enumerate_leveled_graphs
from ibltransfer.ibl import verify_maurer_cartan, zero_structure
from ibltransfer.linalg import GradedMap, GradedSpace, Q
from ibltransfer.transfer import transfer_all


def _round_trip(obj):
    text = io.dumps(obj)
    back = io.loads(text)
    assert io.dumps(back) == text
    return back


def test_zero_structure_round_trip_is_byte_identical():
    s = zero_structure(ChainComplex.zero(GradedSpace({-1: 1, 0: 2})), 3)
    assert _round_trip(s) == s
    assert json.loads(io.dumps(s))["payload"]["ops"] == []


def test_every_kind_round_trips():
    s = random_strict_ibl(random.Random(0), max_weight=3)
    c = homology_contraction(s.complex)
    nu, i_inf, p_inf = transfer_all(s, c, 3)
    for obj in (s.space, s.complex.d, s.complex, s, nu, i_inf, p_inf,
                verify_maurer_cartan(nu), list(enumerate_leveled_graphs(2, 2, 0))):
        assert _round_trip(obj) == obj
    back = _round_trip(c)
    assert (back.big, back.small, back.i, back.p, back.h) == (c.big, c.small, c.i, c.p, c.h)
    g = enumerate_leveled_graphs(1, 2, 1)[-1]
    assert _round_trip(g) == g


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 2))
def test_random_maps_round_trip(seed, k, l):
    rng = random.Random(seed)
    A = GradedSpace({-1: rng.randint(0, 2), 0: rng.randint(1, 2), 1: rng.randint(0, 2)})
    f = random_map(rng, A, A, k, l, rng.randint(-1, 1), 0.5, 7)
    assert _round_trip(f) == f


def test_rationals_are_written_as_fractions():
    A = GradedSpace({0: 2})
    f = GradedMap.from_entries(A, A, 1, 1, 0, {((0,), (1,)): Q(-3, 6), ((1,), (0,)): 4})
    entries = json.loads(io.dumps(f))["payload"]["entries"]
    assert entries == [[[0], [1], "-1/2"], [[1], [0], "4/1"]]


def _doc(kind, payload):
    return json.dumps({"formatVersion": io.FORMAT_VERSION, "kind": kind, "payload": payload})


def test_contraction_violating_ph_is_rejected():
    A = GradedSpace({0: 1, 1: 1})
    ident = GradedMap.identity(A)
    h = GradedMap.from_entries(A, A, 1, 1, 1, {((0,), (1,)): 1})
    bad = Contraction(ChainComplex.zero(A), ChainComplex.zero(A), ident, ident, h, check=False)
    with pytest.raises(io.ValidationError, match="p∘h ≠ 0"):
        io.loads(io.dumps(bad))


def test_invariant_violations_name_the_invariant():
    A = GradedSpace({0: 1, 1: 1, 2: 1})
    d = {"nIn": 1, "nOut": 1, "degree": -1, "entries": [[[1], [0], "1/1"], [[2], [1], "1/1"]]}
    with pytest.raises(io.ValidationError, match="d∘d ≠ 0"):
        io.loads(_doc("ChainComplex", {"degrees": list(A.degrees), "d": d}))
    op = {"nIn": 2, "nOut": 1, "degree": 0, "entries": [[[0, 1], [0], "1/1"]]}
    s = {"complex": {"degrees": [0, 0], "d": {"nIn": 1, "nOut": 1, "degree": -1, "entries": []}},
         "maxWeight": 1, "ops": [{"corolla": [2, 1, 0], "map": op}]}
    with pytest.raises(io.ValidationError, match="skew"):
        io.loads(_doc("IBLStructure", s))
    op["entries"] = [[[0, 1], [0], "2/4"]]
    with pytest.raises(io.ValidationError, match="lowest terms"):
        io.loads(_doc("IBLStructure", s))
    op["entries"] = [[[0, 1], [0], "1/1"], [[1, 0], [0], "-1/1"]]
    op["degree"] = 1
    with pytest.raises(io.ValidationError, match="degree"):
        io.loads(_doc("IBLStructure", s))


def test_malformed_documents_report_a_location():
    with pytest.raises(io.ParseError, match="line 1 column"):
        io.loads('{"formatVersion": "1.0", "kind": ')
    with pytest.raises(io.ParseError, match=r"\$\.payload\.degrees\[1\]"):
        io.loads(_doc("GradedSpace", {"degrees": [0, "x"]}))
    with pytest.raises(io.ParseError, match="kind"):
        io.loads(_doc("Nonsense", {}))
    with pytest.raises(io.ParseError, match="formatVersion"):
        io.loads(json.dumps({"formatVersion": "0.1", "kind": "GradedSpace",
                             "payload": {"degrees": []}}))
    with pytest.raises(io.ParseError, match="expected kind ChainComplex"):
        io.loads(_doc("GradedSpace", {"degrees": [0]}), kind="ChainComplex")


def test_unknown_objects_are_not_serialized():
    with pytest.raises(TypeError):
        io.dumps(object())

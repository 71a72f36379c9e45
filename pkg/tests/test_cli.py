import json

import pytest
from fixtures import GOLDEN, RUNS, run

from ibltransfer import cli, io
from ibltransfer.complexes import ChainComplex, symmetric_homotopy
from ibltransfer.corolla import Corolla
from ibltransfer.ibl import make_ibl_structure, zero_structure
from ibltransfer.linalg import GradedMap, GradedSpace, compose
from ibltransfer.morphisms import InfinityMorphism


def test_enumerate_count(capsys):
    assert cli.main(["enumerate", "--k", "1", "--l", "1", "--g", "1", "--count-only"]) == 0
    assert capsys.readouterr().out.strip() == "2"
    assert cli.main(["enumerate", "--k", "2", "--l", "2", "--g", "0", "--max-weight", "2",
                     "--count-only"]) == 0
    assert capsys.readouterr().out.strip() == "6"
    assert cli.main(["enumerate", "--k", "2", "--l", "2", "--g", "0", "--max-weight", "1"]) == 2
    assert cli.main(["enumerate", "--k", "0", "--l", "1", "--g", "0"]) == 2


def test_verify_mc_on_abelian_structure(tmp_path, capsys):
    A = GradedSpace({0: 2, 1: 1})
    d = GradedMap.from_entries(A, A, 1, 1, -1, {((2,), (0,)): 1})
    io.save(zero_structure(ChainComplex(A, d), 3), tmp_path / "s.json")
    assert cli.main(["verify-mc", "--structure", str(tmp_path / "s.json"),
                     "--max-weight", "3"]) == 0
    assert "vanish" in capsys.readouterr().out


def test_verify_mc_failure_exits_one(tmp_path, capsys):
    # a bracket on k^3 violating Jacobi: [e0,e1] = e1, [e1,e2] = e0, [e0,e2] = 0
    A = GradedSpace({0: 3})
    br = GradedMap.from_entries(A, A, 2, 1, 0, {((0, 1), (1,)): 1, ((1, 0), (1,)): -1,
                                                 ((1, 2), (0,)): 1, ((2, 1), (0,)): -1})
    s = make_ibl_structure(ChainComplex.zero(A), {(2, 1, 0): br}, 2)
    io.save(s, tmp_path / "s.json")
    code = cli.main(["verify-mc", "--structure", str(tmp_path / "s.json"), "--max-weight", "2",
                     "--report", str(tmp_path / "r.json")])
    assert code == 1
    assert "c(3,1,0)" in capsys.readouterr().err
    rep = io.load(tmp_path / "r.json", "RelationReport")
    assert not rep.ok


def test_transfer_then_verify(tmp_path):
    p = tmp_path
    assert cli.main(["generate", "--seed", "0", "--max-weight", "3", "--out", str(p / "s.json"),
                     "--contraction", str(p / "c.json")]) == 0
    assert cli.main(["transfer", "--structure", str(p / "s.json"), "--contraction",
                     str(p / "c.json"), "--max-weight", "3", "--out", str(p / "t.json"),
                     "--infinity-in", str(p / "i.json"), "--infinity-proj",
                     str(p / "p.json")]) == 0
    assert cli.main(["verify-mc", "--structure", str(p / "t.json"), "--max-weight", "3"]) == 0
    for m in ("i", "p"):
        assert cli.main(["check-morphism", "--morphism", str(p / f"{m}.json"),
                         "--max-weight", "3"]) == 0
    assert cli.main(["compose", "--first", str(p / "i.json"), "--second", str(p / "p.json"),
                     "--max-weight", "3", "--out", str(p / "pi.json")]) == 0
    assert cli.main(["check-morphism", "--morphism", str(p / "pi.json"),
                     "--max-weight", "3"]) == 0
    assert cli.main(["invert", "--morphism", str(p / "pi.json"), "--max-weight", "2",
                     "--out", str(p / "inv.json")]) == 0
    assert io.load(p / "inv.json").max_weight == 2
    # i then i does not compose
    assert cli.main(["compose", "--first", str(p / "i.json"), "--second", str(p / "i.json"),
                     "--max-weight", "3", "--out", str(p / "x.json")]) == 2
    assert cli.main(["transfer", "--structure", str(p / "s.json"), "--contraction",
                     str(p / "c.json"), "--max-weight", "3", "--max-genus", "0",
                     "--out", str(p / "g.json"), "--infinity-in", str(p / "x.json")]) == 2


def test_check_morphism_failure(tmp_path):
    A = GradedSpace({0: 2})
    s = make_ibl_structure(ChainComplex.zero(A), {(2, 1, 0): GradedMap.from_entries(
        A, A, 2, 1, 0, {((0, 1), (0,)): 1, ((1, 0), (0,)): -1})}, 2)
    # [f0 e0, f0 e1] = 2 e0 but f0 [e0, e1] = e0
    f0 = GradedMap.from_entries(A, A, 1, 1, 0, {((0,), (0,)): 1, ((1,), (1,)): 2})
    io.save(InfinityMorphism(s, s, {(1, 1, 0): f0}, 2), tmp_path / "f.json")
    assert cli.main(["check-morphism", "--morphism", str(tmp_path / "f.json"),
                     "--max-weight", "2"]) == 1
    assert cli.main(["invert", "--morphism", str(tmp_path / "f.json"), "--max-weight", "2",
                     "--out", str(tmp_path / "g.json")]) == 0
    singular = GradedMap.from_entries(A, A, 1, 1, 0, {((0,), (0,)): 1})
    io.save(InfinityMorphism(s, s, {(1, 1, 0): singular}, 2), tmp_path / "f.json")
    assert cli.main(["invert", "--morphism", str(tmp_path / "f.json"), "--max-weight", "2",
                     "--out", str(tmp_path / "g.json")]) == 2


def test_homology_and_extend(tmp_path):
    p = tmp_path
    B = GradedSpace({0: 1, 1: 1})
    cone = ChainComplex(B, GradedMap.from_entries(B, B, 1, 1, -1, {((1,), (0,)): 1}))
    io.save(cone, p / "cone.json")
    assert cli.main(["homology", "--complex", str(p / "cone.json"), "--out",
                     str(p / "h.json")]) == 0
    assert io.load(p / "h.json").small.space.dim == 0
    assert cli.main(["generate", "--seed", "1", "--max-weight", "3",
                     "--out", str(p / "s.json")]) == 0
    s = io.load(p / "s.json")
    io.save(GradedMap.zero(s.space, B, 1, 1, 0), p / "f0.json")
    assert cli.main(["extend", "--map", str(p / "f0.json"), "--source", str(p / "s.json"),
                     "--target-complex", str(p / "cone.json"), "--max-weight", "3",
                     "--out", str(p / "f.json")]) == 0
    assert cli.main(["check-morphism", "--morphism", str(p / "f.json"),
                     "--max-weight", "3"]) == 0
    # a target with homology is refused
    io.save(ChainComplex.zero(B), p / "flat.json")
    assert cli.main(["extend", "--map", str(p / "f0.json"), "--source", str(p / "s.json"),
                     "--target-complex", str(p / "flat.json"), "--max-weight", "3",
                     "--out", str(p / "f.json")]) == 2


def test_input_errors_exit_two(tmp_path, capsys):
    assert cli.main(["verify-mc", "--max-weight", "1"]) == 2
    assert cli.main(["verify-mc", "--structure", str(tmp_path / "missing.json"),
                     "--max-weight", "1"]) == 2
    (tmp_path / "bad.json").write_text('{"formatVersion": "1.0", "kind": "IBLStructure", '
                                       '"payload": {"complex": 3}}')
    assert cli.main(["verify-mc", "--structure", str(tmp_path / "bad.json"),
                     "--max-weight", "1"]) == 2
    err = capsys.readouterr().err
    assert "$.payload" in err
    io.save(GradedSpace({0: 1}), tmp_path / "space.json")
    assert cli.main(["verify-mc", "--structure", str(tmp_path / "space.json"),
                     "--max-weight", "1"]) == 2
    assert "expected kind IBLStructure" in capsys.readouterr().err


@pytest.mark.parametrize("name,argv", RUNS, ids=[r[0] for r in RUNS])
def test_golden_outputs_are_reproduced(name, argv, tmp_path):
    for threads in (1, 3):
        out = tmp_path / str(threads)
        out.mkdir()
        assert run(name, argv, GOLDEN, out, threads) == (GOLDEN / f"{name}.json").read_bytes()


def test_golden_nu111_matches_closed_form():
    s = io.load(GOLDEN / "nu111_structure.json")
    c = io.load(GOLDEN / "nu111_contraction.json")
    nu = io.load(GOLDEN / "nu111_transfer.json")
    mu = s.ops
    h2 = symmetric_homotopy(c, 2)
    expect = compose(c.p, compose(mu[Corolla(1, 1, 1)], c.i)) + compose(
        c.p, compose(mu[Corolla(2, 1, 0)], compose(h2, compose(mu[Corolla(1, 2, 0)], c.i))))
    assert nu.ops[Corolla(1, 1, 1)] == expect
    assert json.loads((GOLDEN / "nu111_transfer.json").read_text())["kind"] == "IBLStructure"

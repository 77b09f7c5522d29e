import os
import pathlib

import pytest

import cogent_core as cg

ROOT = pathlib.Path(os.environ.get("COGENT_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
ACCEPT = ROOT / "tests" / "corpus" / "accept"
REJECT = ROOT / "tests" / "corpus" / "reject"

ADD = "(def main (forall) (fn (x u8) u8 (op + x 1u8)))"


def test_check_returns_trees():
    trees = cg.check(ADD)
    assert trees["main"]["rule"] == "PrimOp"


def test_run_both_semantics():
    assert cg.run(ADD, "main", {"lit": 255, "ty": "u8"}) == {"lit": 0, "ty": "u8"}
    out = cg.run(ADD, "main", {"lit": 4, "ty": "u8"}, semantics="update")
    assert out["value"] == {"lit": 5, "ty": "u8"}


def test_errors_carry_codes():
    with pytest.raises(cg.CogentError) as e:
        cg.check("(def main (forall) (fn (x u8) u16 x))")
    assert e.value.code == "TypeMismatch"
    assert "error[TypeMismatch]" in e.value.diagnostic
    assert e.value.diagnostic.startswith("<input>:")


def test_reject_corpus_codes():
    for path in sorted(REJECT.glob("*.cogc")):
        text = path.read_text()
        want = text.splitlines()[0].split("expect:")[1].strip()
        with pytest.raises(cg.CogentError) as e:
            cg.check(text)
        assert e.value.code == want, path.name


def test_oracle_passes_on_corpus_sample():
    for path in sorted(ACCEPT.glob("*.cogc"))[::6]:
        verdicts = cg.oracle(path.read_text(), "main", count=3, seed=5)
        assert len(verdicts) == 3
        assert all(v["pass"] for v in verdicts), path.name


def test_passes_print_programs():
    text = (ACCEPT / "a10_match3.cogc").read_text()
    assert "match" not in cg.desugar(text)
    program, renames = cg.mono((ACCEPT / "a05_poly_id.cogc").read_text())
    assert "(forall)" in program
    assert renames
    assert "(let" in cg.anf("(def main (forall) (fn (x u8) u8 (op + (op + x x) x)))")


def test_kinds():
    assert cg.max_kind("u8") == "DSE"
    assert cg.max_kind("(rec wr (n u8))") == "E"
    assert cg.max_kind("a", {"a": "DS"}) == "DS"
    with pytest.raises(ValueError):
        cg.max_kind("a", {"a": "X"})


def test_emit_c():
    c = cg.emit_c(ADD, "add")
    assert "#include" in c["source"]
    assert c["header"]

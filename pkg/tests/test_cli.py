import subprocess
import sys
from pathlib import Path

import pytest

from locality_lab.cli import main
from locality_lab.serialize import load

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_golden_build_report(capsys):
    code, out, _ = run(capsys, "build", "--group", "builtin:s4", "--prime", "2",
                       "--emit", "structured")
    assert code == 0
    assert out == (DATA / "s4_build.report").read_text()


def test_golden_axioms_report(capsys):
    code, out, _ = run(capsys, "verify", "--group", "builtin:s4", "--prime", "2",
                       "--checks", "axioms", "--emit", "structured")
    assert code == 0
    assert out == (DATA / "s4_axioms.report").read_text()


def test_structured_report_is_stable(capsys):
    argv = ("verify", "--group", "builtin:sl23", "--prime", "2",
            "--checks", "lemma-props,axioms", "--emit", "structured")
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]
    ids = [x.split(":")[0].rsplit(".", 1)[0] for x in first.splitlines()
           if x.startswith("check.")]
    assert ids == sorted(ids)


def test_mutated_dump_exits_one_with_witness(capsys):
    code, out, _ = run(capsys, "verify", "--load", str(DATA / "s4_cr_mutated.dump"),
                       "--checks", "axioms", "--emit", "structured")
    assert code == 1
    assert "check.axioms.contraction-length-3.verdict: fail" in out
    assert "check.axioms.contraction-length-3.witness: (1, 1, 3, 'contraction changes product')" in out
    assert out.rstrip().endswith("result: fail")


def test_not_proper_is_precondition_failure(capsys):
    code, out, _ = run(capsys, "verify", "--group", "builtin:c2xs3", "--prime", "2",
                       "--checks", "bijection")
    assert code == 3
    assert "NotProper" in out


@pytest.mark.parametrize("argv", [
    ("build", "--group", "builtin:s4", "--prime", "4"),
    ("build", "--group", "builtin:s4", "--prime", "5"),
    ("build", "--group", "builtin:nope", "--prime", "2"),
    ("build", "--group", "builtin:s4", "--delta", "weird"),
    ("verify", "--group", "builtin:s4", "--checks", "axioms,bogus"),
    ("build",),
    ("frobnicate",),
])
def test_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_empty_check_list(capsys):
    code, out, _ = run(capsys, "verify", "--group", "builtin:s4", "--checks", "")
    assert code == 0 and "result: pass" in out


def test_explicit_delta(capsys):
    code, out, _ = run(capsys, "build", "--group", "builtin:s4", "--prime", "2",
                       "--delta", "list:(1 2)(3 4),(1 3)(2 4)", "--emit", "structured")
    assert code == 0
    assert "summary.elements: 24" in out


def test_dump_then_verify(capsys, tmp_path):
    path = tmp_path / "gl32.dump"
    code, _, _ = run(capsys, "build", "--group", "builtin:gl32", "--prime", "2",
                     "--delta", "cr-closure", "--dump", str(path))
    assert code == 0 and load(path).n == 40
    code, out, _ = run(capsys, "verify", "--load", str(path),
                       "--checks", "axioms,lemma-props,quotient")
    assert code == 0, out


def test_verify_all_checks_s4(capsys):
    code, out, _ = run(capsys, "verify", "--group", "builtin:s4", "--prime", "2",
                       "--emit", "structured")
    assert code == 0, out
    for cid in ("axioms", "bijection", "expansion", "lemma-props", "products", "quotient"):
        assert f"check.{cid}." in out


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "pns", "--group", "builtin:s4", "--prime", "2",
                       "--emit", "structured")
    assert code == 0
    assert "summary.partial_normal_subgroups: 4" in out
    assert "missing" not in out
    code, out, _ = run(capsys, "enumerate", "subsystems", "--group", "builtin:q8",
                       "--prime", "2", "--emit", "structured")
    assert code == 0
    assert "summary.normal_subsystems: 6" in out


def test_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "locality_lab.cli", "build",
                           "--group", "builtin:d8", "--prime", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "elements: 8" in proc.stdout

import subprocess
import sys

import pytest

from regtrans.cli import main


def cli(*args):
    r = subprocess.run([sys.executable, "-m", "regtrans", *args], capture_output=True, text=True)
    return r.returncode, r.stdout, r.stderr


def test_run_sample():
    assert cli("run", "segment_copy", "aaabbaba") == (0, "aaabbbaba\n", "")


def test_run_undefined():
    code, out, _ = cli("run", "even-identity", "aba")
    assert code == 1 and out == "undefined\n"


def test_run_kind_check(capsys):
    assert main(["run", "--kind-check", "segment_copy_jumps", "ab"]) == 0
    assert "deterministic: yes" in capsys.readouterr().err


def test_nondeterministic_needs_flag():
    assert cli("run", "guesser", "aa")[0] == 2
    code, out, _ = cli("run", "--enumerate", "guesser", "aa")
    assert code == 0 and out.split() == ["aa", "ab", "ba", "bb"]


def test_enumerate_transductions():
    code, out, _ = cli("enumerate", "eps_two_outputs", "")
    assert (code, out.split()) == (0, ["a", "b"])
    code, out, _ = cli("enumerate", "guess_square", "a")
    assert out.split() == ["a#a", "b#b"]
    assert cli("enumerate", "guess_square", "ab")[0] == 1


def test_equiv():
    code, out, _ = cli("equiv", "segment_copy", "segment_copy_jumps", "-n", "4")
    assert code == 0 and out.startswith("equal on 31 inputs")
    code, out, _ = cli("equiv", "guesser", "two_guesses", "--alphabet", "a", "-n", "2")
    assert code == 1 and out.startswith("counterexample: ε")


def test_convert_and_rerun(tmp_path):
    out = tmp_path / "r.machine"
    assert cli("convert", "segment_copy_jumps", "--to", "mso-rla", "-o", str(out))[0] == 0
    assert cli("run", str(out), "aaabbaba")[1] == "aaabbbaba\n"
    assert cli("convert", "segment_copy", "--to", "gsm")[0] == 2
    assert cli("convert", "segment_copy", "--to", "machine")[0] == 2


def test_convert_transduction_to_machine(tmp_path):
    out = tmp_path / "m.machine"
    assert cli("convert", "segment_copy.transduction", "--to", "machine", "-o", str(out))[0] == 0
    assert cli("run", str(out), "aab")[1] == "aabb\n"


def test_outputs_are_reproducible():
    a = cli("convert", "segment_copy", "--to", "msoe-pipeline")
    b = cli("convert", "segment_copy", "--to", "msoe-pipeline")
    assert a == b and a[0] == 0 and a[1].startswith("pipeline")
    assert cli("decompose", "guesser", "--input", "aa") == cli("decompose", "guesser", "--input", "aa")


def test_track_and_hennie():
    code, out, _ = cli("track", "segment_copy", "ab")
    assert code == 0 and out.startswith("pos 0 ⊢")
    assert cli("track", "segment_copy", "ab", "-k", "1")[0] == 1
    code, out, _ = cli("hennie-run", "hennie_copy", "a")
    assert (code, out.split()) == (0, ["a#a", "b#b"])


def test_compose():
    code, out, _ = cli("compose", "guesser", "doubler", "a")
    assert (code, out.split()) == (0, ["a#a", "b#b"])


def test_compile_formula():
    code, out, _ = cli("compile-formula", "(ex x (lab a x))")
    assert code == 0 and "states: 2" in out


@pytest.mark.parametrize("args", [["run", "no-such-file", "a"], ["compile-formula", "(ex x"],
                                  ["run", "segment_copy", "abc"], ["frobnicate"]])
def test_errors_exit_2(args):
    assert cli(*args)[0] == 2

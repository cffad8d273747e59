import subprocess
import sys
from pathlib import Path

import pytest

from truncarx.circuit import parse_circuit, parse_system
from truncarx.cli import main
from truncarx.threefish import ThreefishParams, build_threefish_circuit

GOLDEN = Path(__file__).parent / "golden"

ADD1_N4 = "circuit n=4 regs=2\ninput r0 r1\nadd r0 r0 r1\noutput r0\n"
TOY = (
    "circuit n=4 regs=2\n"
    "input r0 r1\n"
    "add r0 r0 r1\n"
    "xor r1 r1 r0\n"
    "add r0 r0 r1\n"
    "output r0 r1\n"
)


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


@pytest.fixture
def add1_file(tmp_path):
    p = tmp_path / "add1.circuit"
    p.write_text(ADD1_N4)
    return str(p)


@pytest.fixture
def toy_file(tmp_path):
    p = tmp_path / "toy.circuit"
    p.write_text(TOY)
    return str(p)


class TestProb:
    def test_pi(self, capsys):
        code, out, _ = run(capsys, "prob", "pi", "--m", "9", "--n", "64")
        assert code == 0 and out == "97.38680\n"

    def test_pi_exact(self, capsys):
        code, out, _ = run(capsys, "prob", "pi", "--m", "9", "--n", "64", "--exact")
        assert code == 0 and out == "17964694065364406293/2^64\n"

    def test_table(self, capsys):
        code, out, _ = run(capsys, "prob", "table", "--lo", "4", "--hi", "6")
        assert code == 0
        assert out.splitlines() == [
            "m\tN=32\tN=64",
            "4\t63.62771\t37.10136",
            "5\t80.94266\t62.31794",
            "6\t90.49360\t79.59719",
        ]

    def test_expected_exact_base(self, capsys):
        code, out, _ = run(
            capsys, "prob", "expected", "--m", "9", "--n", "64", "--adds", "278"
        )
        assert code == 0 and out == "0.0006353728923909569\n"

    def test_expected_rounded_flag(self, capsys):
        code, out, _ = run(
            capsys, "prob", "expected", "--m", "9", "--n", "64", "--adds", "278",
            "--rounded-pi",
        )
        assert code == 0 and out == repr(0.97387**278) + "\n"

    def test_expected_explicit_base(self, capsys):
        code, out, _ = run(
            capsys, "prob", "expected", "--m", "12", "--n", "32", "--adds", "1345",
            "--rounded-pi", "0.99488",
        )
        assert code == 0 and out == repr(0.99488**1345) + "\n"

    def test_pi_out_of_range(self, capsys):
        code, _, err = run(capsys, "prob", "pi", "--m", "64", "--n", "64")
        assert code == 2 and err.startswith("error:")


class TestTruncAdd:
    def test_frozen_output(self, capsys):
        code, out, _ = run(capsys, "trunc-add", "--n", "4", "--m", "1", "0x9", "0xb")
        assert code == 0
        assert out.splitlines() == [
            "x 0x9",
            "y 0xb",
            "result 0x0",
            "full 0x4",
            "carry_trunc [0, 0, 1, 0]",
            "carry_full [0, 1, 1, 0]",
            "agree false",
        ]

    def test_agree_true(self, capsys):
        _, out, _ = run(capsys, "trunc-add", "--n", "8", "--m", "7", "9", "11")
        assert "result 0x14" in out and "agree true" in out

    def test_decimal_and_hex_inputs_equal(self, capsys):
        _, a, _ = run(capsys, "trunc-add", "--n", "8", "--m", "2", "160", "77")
        _, b, _ = run(capsys, "trunc-add", "--n", "8", "--m", "2", "0xa0", "0x4d")
        assert a == b

    def test_bad_value(self, capsys):
        code, _, err = run(capsys, "trunc-add", "--n", "8", "--m", "2", "12g", "1")
        assert code == 2 and "bad numeric value" in err


class TestCircuit:
    def test_eval(self, capsys, toy_file):
        code, out, _ = run(
            capsys, "circuit", "eval", "--file", toy_file, "--inputs", "0xb,0x5"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("outputs 0x") and lines[1] == "add_count 2"

    def test_eval_m_override_changes_output(self, capsys, toy_file):
        _, full, _ = run(capsys, "circuit", "eval", "--file", toy_file,
                         "--inputs", "0xb,0x5")
        _, xored, _ = run(capsys, "circuit", "eval", "--file", toy_file,
                          "--inputs", "0xb,0x5", "--m", "0")
        assert full != xored

    def test_eval_missing_inputs(self, capsys, toy_file):
        code, _, err = run(capsys, "circuit", "eval", "--file", toy_file)
        assert code == 2 and "input words" in err

    def test_degree(self, capsys, add1_file):
        code, out, _ = run(capsys, "circuit", "degree", "--file", add1_file)
        assert code == 0 and out == "degree 4\n"
        _, out, _ = run(capsys, "circuit", "degree", "--file", add1_file, "--m", "0")
        assert out == "degree 1\n"

    def test_encode(self, capsys, add1_file, tmp_path):
        out_path = tmp_path / "enc.anf"
        code, out, _ = run(
            capsys, "circuit", "encode", "--file", add1_file, "--out", str(out_path)
        )
        assert code == 0 and out == f"wrote {out_path}\n"
        sys_ = parse_system(out_path.read_text())
        assert sys_.kind == "encoding"
        assert (sys_.nvars, len(sys_.polys)) == (8, 4)

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "circuit", "eval", "--file", "/nonexistent.circuit")
        assert code == 2 and "cannot read" in err

    def test_malformed_file(self, capsys, tmp_path):
        p = tmp_path / "bad.circuit"
        p.write_text("circuit n=4 regs=1\n")
        code, _, err = run(capsys, "circuit", "degree", "--file", str(p))
        assert code == 2 and "line" in err


class TestSystemAndSolve:
    def test_collision_pipeline(self, capsys, add1_file, tmp_path):
        sys_path = tmp_path / "coll.anf"
        code, out, _ = run(
            capsys, "system", "collision", "--file", add1_file, "--out", str(sys_path)
        )
        assert code == 0 and out == f"wrote {sys_path}\n"
        code, out, _ = run(
            capsys, "solve", "--system", str(sys_path), "--mode", "count"
        )
        assert code == 0
        assert out == "count 4096\ncomplete true\n"
        code, out, _ = run(
            capsys, "solve", "--system", str(sys_path), "--mode", "count",
            "--nontrivial",
        )
        assert out == "count 3840\ncomplete true\n"

    def test_preimage_pipeline(self, capsys, add1_file, tmp_path):
        sys_path = tmp_path / "pre.anf"
        run(capsys, "system", "preimage", "--file", add1_file,
            "--target", "0xb", "--out", str(sys_path))
        code, out, _ = run(capsys, "solve", "--system", str(sys_path))
        assert code == 0
        lines = out.splitlines()
        assert lines[-2:] == ["count 16", "complete true"]
        assert len(lines) == 18
        assert all(ln.startswith("0x") for ln in lines[:-2])
        for ln in lines[:-2]:
            a = int(ln, 16)
            assert ((a & 0xF) + (a >> 4)) & 0xF == 0xB

    def test_preimage_needs_target(self, capsys, add1_file, tmp_path):
        code, _, err = run(capsys, "system", "preimage", "--file", add1_file,
                           "--out", str(tmp_path / "x.anf"))
        assert code == 2 and "--target" in err

    def test_solve_first_and_limits(self, capsys, add1_file, tmp_path):
        sys_path = tmp_path / "coll.anf"
        run(capsys, "system", "collision", "--file", add1_file, "--out", str(sys_path))
        code, out, _ = run(capsys, "solve", "--system", str(sys_path),
                           "--mode", "first")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "0x0" and lines[-1] == "complete false"
        code, out, _ = run(capsys, "solve", "--system", str(sys_path),
                           "--max-solutions", "3")
        assert out.splitlines()[-2] == "count 3"

    def test_solve_budget_exit_code(self, capsys, add1_file, tmp_path):
        sys_path = tmp_path / "coll.anf"
        run(capsys, "system", "collision", "--file", add1_file, "--out", str(sys_path))
        code, _, err = run(capsys, "solve", "--system", str(sys_path),
                           "--budget", "4")
        assert code == 3 and err.startswith("error:")

    def test_solve_bad_system_file(self, capsys, tmp_path):
        p = tmp_path / "junk.anf"
        p.write_text("not a system\n")
        code, _, err = run(capsys, "solve", "--system", str(p))
        assert code == 2 and err.startswith("error:")


class TestThreefish:
    KEY = ("0x1716151413121110,0x1f1e1d1c1b1a1918,"
           "0x2726252423222120,0x2f2e2d2c2b2a2928")
    TWEAK = "0x0706050403020100,0x0f0e0d0c0b0a0908"
    PT = ("0xf8f9fafbfcfdfeff,0xf0f1f2f3f4f5f6f7,"
          "0xe8e9eaebecedeeef,0xe0e1e2e3e4e5e6e7")

    def test_encrypt_zero_kat(self, capsys):
        code, out, _ = run(capsys, "threefish", "encrypt")
        assert code == 0
        assert out == (
            "ciphertext 0x94eeea8b1f2ada84 0xadf103313eae6670 "
            "0x952419a1f4b16d53 0xd83f13e63c9f6b11\n"
            "add_count 277\n"
        )

    def test_encrypt_vector2(self, capsys):
        code, out, _ = run(
            capsys, "threefish", "encrypt", "--key", self.KEY,
            "--tweak", self.TWEAK, "--block", self.PT,
        )
        assert code == 0
        assert out.splitlines()[0] == (
            "ciphertext 0xdf8fea0eff91d0e0 0xd50ad82ee69281c9 "
            "0x76f48d58085d869d 0xdf975e95b5567065"
        )

    def test_encrypt_key_arity(self, capsys):
        code, _, err = run(capsys, "threefish", "encrypt", "--key", "1,2,3")
        assert code == 2 and "--key needs 4" in err

    def test_circuit_emission(self, capsys, tmp_path):
        out_path = tmp_path / "tf.circuit"
        code, out, _ = run(
            capsys, "threefish", "circuit", "--n", "4", "--rounds", "2",
            "--m", "2", "--out", str(out_path),
        )
        assert code == 0 and out == f"wrote {out_path}\n"
        emitted = parse_circuit(out_path.read_text())
        want = build_threefish_circuit(ThreefishParams(4, 2, 2))
        assert emitted.digest() == want.digest()

    def test_ideal_collision(self, capsys, tmp_path):
        out_path = tmp_path / "ideal.anf"
        code, out, _ = run(
            capsys, "threefish", "ideal", "collision", "--n", "4",
            "--rounds", "1", "--m", "2", "--out", str(out_path),
        )
        assert code == 0
        sys_ = parse_system(out_path.read_text())
        assert sys_.kind == "collision"
        assert (sys_.nvars, len(sys_.polys)) == (32, 16)

    def test_ideal_preimage_needs_target(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "threefish", "ideal", "preimage", "--n", "4",
            "--rounds", "1", "--m", "2", "--out", str(tmp_path / "x.anf"),
        )
        assert code == 2

    def test_ideal_subkey_arity(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "threefish", "ideal", "collision", "--n", "4",
            "--rounds", "4", "--m", "1", "--subkey", "1,2,3,4",
            "--out", str(tmp_path / "x.anf"),
        )
        assert code == 2 and "need 2 --subkey" in err


class TestSensitivity:
    def test_exhaustive_circuit(self, capsys, toy_file):
        code, out, _ = run(
            capsys, "sensitivity", "--algo", f"circuit:{toy_file}", "--exhaustive"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == (
            "# algo=circuit:toy.circuit seed=0 adds=2 "
            "sensitivity=0 threshold=0.001"
        )
        assert lines[2].split("\t")[:3] == ["0", "256", "32"]
        assert lines[5].split("\t")[:3] == ["3", "256", "256"]

    def test_skein_seeded(self, capsys):
        args = ("sensitivity", "--algo", "skein256", "--trials", "3000",
                "--seed", "1", "--m-range", "8:10")
        code, out1, _ = run(capsys, *args)
        assert code == 0
        _, out2, _ = run(capsys, *args)
        assert out1 == out2
        assert out1.splitlines()[0].startswith(
            "# algo=skein256 seed=1 adds=277 "
        )

    def test_m_range_formats_agree(self, capsys):
        base = ("sensitivity", "--algo", "skein256", "--trials", "1000",
                "--seed", "4")
        _, colon, _ = run(capsys, *base, "--m-range", "8:10")
        _, commas, _ = run(capsys, *base, "--m-range", "8,9,10")
        assert colon == commas

    def test_workers_identical(self, capsys):
        base = ("sensitivity", "--algo", "skein256", "--trials", "40000",
                "--seed", "1", "--m-range", "9,10")
        _, w1, _ = run(capsys, *base, "--workers", "1")
        _, w4, _ = run(capsys, *base, "--workers", "4")
        assert w1 == w4

    def test_unknown_algo(self, capsys):
        code, _, err = run(capsys, "sensitivity", "--algo", "md5")
        assert code == 2 and "unknown --algo" in err


HELP_CASES = {
    "help_main.txt": (),
    "help_prob_expected.txt": ("prob", "expected"),
    "help_trunc_add.txt": ("trunc-add",),
    "help_circuit_eval.txt": ("circuit", "eval"),
    "help_system.txt": ("system",),
    "help_solve.txt": ("solve",),
    "help_threefish_encrypt.txt": ("threefish", "encrypt"),
    "help_threefish_ideal.txt": ("threefish", "ideal"),
    "help_sensitivity.txt": ("sensitivity",),
}


class TestHelp:
    @pytest.mark.parametrize("fname,argv", HELP_CASES.items(), ids=list(HELP_CASES))
    def test_golden_help(self, capsys, monkeypatch, fname, argv):
        monkeypatch.setenv("COLUMNS", "80")
        code, out, _ = run(capsys, *argv, "--help")
        assert code == 0
        assert out == (GOLDEN / fname).read_text()

    def test_flags_documented(self, capsys, monkeypatch):
        monkeypatch.setenv("COLUMNS", "80")
        _, out, _ = run(capsys, "sensitivity", "--help")
        for flag in ("--algo", "--trials", "--seed", "--m-range", "--threshold",
                     "--workers", "--exhaustive"):
            assert flag in out
        _, out, _ = run(capsys, "threefish", "encrypt", "--help")
        for flag in ("--n", "--rounds", "--m", "--scope", "--key", "--tweak",
                     "--block"):
            assert flag in out

    def test_missing_subcommand_is_usage_error(self, capsys):
        assert run(capsys, "prob")[0] == 2
        assert run(capsys)[0] == 2


class TestEntryPoints:
    def test_python_dash_m(self):
        out = subprocess.run(
            [sys.executable, "-m", "truncarx", "prob", "pi", "--m", "9", "--n", "64"],
            capture_output=True, text=True,
        )
        assert out.returncode == 0 and out.stdout == "97.38680\n"

    def test_console_script(self):
        out = subprocess.run(
            ["truncarx", "trunc-add", "--n", "4", "--m", "1", "0x9", "0xb"],
            capture_output=True, text=True,
        )
        assert out.returncode == 0 and "agree false" in out.stdout

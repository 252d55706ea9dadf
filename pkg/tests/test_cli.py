import io
import contextlib

import pytest

from ambreal.cli import main


def run(*argv):
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue().rstrip("\n"), err.getvalue()


# encode


def test_encode_gray_zero():
    code, out, _ = run("encode", "0", "gray", "4")
    assert code == 0
    digits, hull = out.splitlines()
    assert digits == "_ 1 -1 -1"
    assert hull == "[-1/8,1/8]"


def test_encode_sd_third():
    code, out, _ = run("encode", "1/3", "sd", "4")
    assert code == 0
    assert out.splitlines()[0] == "1 -1 1 -1"


def test_encode_domain_error():
    code, _, err = run("encode", "2", "sd", "4")
    assert code == 2 and "outside" in err


# convert


def test_convert_sd_gray_half():
    code, out, _ = run("convert", "sd", "gray", "--value", "1/2", "--digits", "4")
    assert out == "1 ? 1 -1"
    assert code == 0  # the unresolved cell is the oracle bot cell


def test_convert_gray_sd_zero():
    code, out, _ = run("convert", "gray", "sd", "--value", "0", "--digits", "4")
    assert code == 0 and out == "0 0 0 0"


def test_convert_identity():
    code, out, _ = run("convert", "sd", "sd", "--value", "1/3", "--digits", "4")
    assert code == 0 and out == "1 -1 1 -1"


def test_convert_stream_input():
    code, out, _ = run("convert", "sd", "gray", "--stream=1;0", "--digits", "4")
    assert code == 0 and out == "1 ? 1 -1"


def test_convert_needs_input():
    code, _, err = run("convert", "sd", "gray", "--digits", "4")
    assert code == 2


# eval


def test_eval_parallel_or(tmp_path):
    f = tmp_path / "t.cfp"
    f.write_text("main = por Pair(Left(Nil), bot) ;")
    code, out, _ = run("eval", str(f), "--fuel", "10000")
    assert code == 0 and out == "Left(Nil)"


def test_eval_bot_exit_one(tmp_path):
    f = tmp_path / "t.cfp"
    f.write_text("main = bot ;")
    code, out, _ = run("eval", str(f), "--fuel", "1000")
    assert code == 1 and out == "<unresolved>"


def test_eval_raw_policy(tmp_path):
    f = tmp_path / "t.cfp"
    f.write_text("main = f_ret Nil ;")
    code, out, _ = run("eval", str(f), "--policy", "raw", "--depth", "2")
    assert code == 0 and out == "Amb(Left(Nil), <unresolved>)"


def test_eval_parse_error(tmp_path):
    f = tmp_path / "t.cfp"
    f.write_text("main = case x of ;")
    code, _, err = run("eval", str(f))
    assert code == 2


# tree


def test_tree_value():
    code, out, _ = run("tree", "[0,0]", "sdk", "2", "value")
    assert code == 0 and out == "[-1/2,1/2]"
    code, out, _ = run("tree", "[0,0]", "sdk", "0", "value")
    assert out == "[-1,1]"


def test_tree_encode_gray():
    code, out, _ = run("tree", "[-1,1]", "grayk", "1", "encode")
    assert code == 0
    assert out.startswith("(min=-1 -1 max=1 -1")
    assert "(L " in out and "(R " in out


def test_tree_dist():
    code, out, _ = run("tree", "[0,0]", "sdk", "5", "dist", "--other", "[1,1]")
    assert code == 0 and out == "1/2"
    code, out, _ = run("tree", "[0,0]", "sdk", "5", "dist", "--other", "[0,0]")
    assert out == "0"


def test_tree_convert_sdk():
    code, out, _ = run("tree", "[1/3,1/3]", "sdk", "2", "convert")
    assert code == 0 and out.startswith("(min=1 1 1")


def test_tree_convert_grayk():
    code, out, _ = run("tree", "[0,0]", "grayk", "2", "convert")
    assert code == 0 and out.startswith("(E=")


def test_tree_empty_set():
    code, _, err = run("tree", "", "sdk", "2", "value")
    assert code == 2


# oracle


def test_oracle_examples():
    assert run("oracle", "-1,1", "gray") == (0, "[-1/2,0]", "")
    assert run("oracle", "1,0", "sd") == (0, "[1/4,3/4]", "")
    assert run("oracle", "", "sd") == (0, "[-1,1]", "")


def test_oracle_bot_cells():
    code, out, _ = run("oracle", "_,1", "gray")
    assert code == 0 and out == "[-1/2,1/2]"


def test_usage_error_exit_two():
    code, _, _ = run("oracle", "1,0")
    assert code == 2

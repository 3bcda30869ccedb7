import io
import math
import shlex
import subprocess
import sys

import numpy as np
import pytest

from msgkit.cli import parse_angle, run


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _strip_wall(text):
    return "\n".join(l for l in text.splitlines() if not l.startswith("# wall_time"))


def _table(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [l.split(",") for l in lines[1:]]


@pytest.mark.parametrize("text,value", [
    ("pi", math.pi), ("2pi", 2 * math.pi), ("0.5pi", 0.5 * math.pi), ("-pi", -math.pi), ("1.25", 1.25),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


def test_dispersion_example_row():
    code, out, _ = _run(["dispersion", "--n", "2", "--eps", "0.1", "--phi-n", "pi", "--k", "0"])
    assert code == 0
    assert _table(out) == (["k", "omega_sq", "stable"], [["0", "-0.6", "false"]])


def test_potential_example():
    code, out, _ = _run(["potential", "--n", "6", "--eps", "0", "--samples", "3", "--phi-max", "6.283185307"])
    header, rows = _table(out)
    v = [float(r[1]) for r in rows]
    assert code == 0 and v == pytest.approx([0.0, 2.0, 0.0], abs=1e-9)


def test_kink_summary_and_file(tmp_path):
    path = tmp_path / "kink.csv"
    code, out, _ = _run(["kink", "--n", "3", "--eps", "10", "--out", str(path)])
    assert code == 0
    assert out.startswith("energy=") and out.strip().endswith("charge=1 subkinks=3")
    header, rows = _table(path.read_text())
    assert header == ["x", "phi", "slope", "rho", "pressure"]


@pytest.mark.parametrize("argv", [
    ["kink", "--n", "0", "--eps", "1"],
    ["kink", "--n", "2", "--eps", "-1"],
    ["kink", "--n", "2", "--eps", "1", "--bogus"],
    ["static", "--n", "2", "--eps", "1", "--p", "-1", "--slope0", "1"],
    ["static", "--n", "3", "--eps", "10", "--p", "-30"],
    ["evolve", "--n", "2", "--eps", "0.1", "--phi-n", "pi", "--k", "1", "--amplitude", "0.5"],
    [],
])
def test_usage_errors_exit_1(argv):
    code, _, err = _run(argv)
    assert code == 1
    assert "usage" in err


def test_range_message_quotes_band():
    _, _, err = _run(["static", "--n", "3", "--eps", "10", "--p", "-30"])
    assert "-22" in err


@pytest.mark.parametrize("argv", [
    ["phase", "--n", "3", "--eps", "10", "--p", "1"],
    ["static", "--n", "6", "--eps", "10", "--p", "-1", "--step", "0.2"],
    ["evolve", "--n", "2", "--eps", "0.1", "--phi-n", "pi", "--k", "0.2", "--amplitude", "0.1",
     "--dx", "0.1", "--dt", "0.05", "--steps", "4000"],
])
def test_numerical_failures_exit_2(argv):
    code, _, _ = _run(argv)
    assert code == 2


def test_static_launch_from_pressure():
    code, out, _ = _run(["static", "--n", "3", "--eps", "10", "--p", "-17.5", "--x-max", "1"])
    header, rows = _table(out)
    assert float(rows[0][2]) == pytest.approx(3.0)
    code, out, _ = _run(["static", "--n", "4", "--eps", "10", "--p", "-2", "--x-max", "1"])
    header, rows = _table(out)
    assert code == 0 and float(rows[0][2]) == 0.0


@pytest.mark.parametrize("argv", [
    ["kink", "--n", "2", "--eps", "1"],
    ["scan-eos", "--n", "3", "--eps", "10", "--points", "20"],
    ["expand", "--eps", "0.5", "--function", "raised-cosine"],
    ["fixed-points", "--n", "3", "--eps-points", "11"],
    ["scan-energy", "--n", "2", "--eps", "1", "--p-min=-1.5", "--p-max=-1e-5", "--points", "6"],
])
def test_determinism_and_metadata_round_trip(argv):
    _, first, _ = _run(argv)
    _, second, _ = _run(argv)
    assert _strip_wall(first) == _strip_wall(second)
    command = next(l for l in first.splitlines() if l.startswith("# command: "))
    replay = shlex.split(command[len("# command: "):])[1:]
    _, third, _ = _run(replay)
    assert _strip_wall(third) == _strip_wall(first)


def test_jobs_do_not_change_output():
    base = ["scan-energy", "--n", "4", "--eps", "10", "--points", "30"]
    _, serial, _ = _run(base)
    _, parallel, _ = _run(base + ["--jobs", "3"])
    assert _strip_wall(serial) == _strip_wall(parallel)


def test_floats_round_trip():
    _, out, _ = _run(["potential", "--n", "3", "--eps", "0.7", "--samples", "9"])
    _, rows = _table(out)
    phi = np.array([float(r[0]) for r in rows])
    assert np.array_equal(phi, np.linspace(0, 2 * math.pi, 9))


def test_metadata_only_at_top():
    _, out, _ = _run(["scan-eos", "--n", "2", "--eps", "1", "--p-min", "-1", "--p-max", "1", "--points", "5"])
    lines = out.splitlines()
    first_data = next(i for i, l in enumerate(lines) if not l.startswith("#"))
    assert not any(l.startswith("#") for l in lines[first_data:])


def test_evolve_spectrum_file(tmp_path):
    out = tmp_path / "ev.csv"
    code, _, _ = _run(["evolve", "--n", "2", "--eps", "0.1", "--phi-n", "pi", "--k", "2", "--steps", "20",
                       "--out", str(out)])
    assert code == 0
    header, _ = _table((tmp_path / "ev_spectrum.csv").read_text())
    assert header == ["t", "k", "amplitude"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "msgkit", "dispersion", "--n", "1", "--eps", "0",
                           "--phi-n", "0", "--k", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "1,2,true"

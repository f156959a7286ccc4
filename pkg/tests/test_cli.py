import io
import subprocess
import sys

import pytest

from rtdevs.cli import parse_args, run
from rtdevs.timebase import seconds


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(parse_args(argv), stdout=out, stderr=err)
    return code, out.getvalue().splitlines(), err.getvalue()


def test_parse_simulate():
    cfg = parse_args(["simulate", "blinky", "--duration", "40", "--gen-script", "28.5947"])
    assert cfg.mode == "simulate" and cfg.wiring == "simulation"
    assert cfg.duration == seconds(40)
    assert cfg.gen_script == (seconds("28.5947"),)
    assert cfg.tolerance is None and cfg.sigma1 == seconds("0.5") and cfg.sigma2 == seconds(1)
    assert cfg.log is None


def test_parse_run_rt(tmp_path):
    flips = tmp_path / "flips.txt"
    flips.write_text("1.55 1\n")
    cfg = parse_args(["run-rt", "blinky", "--duration", "10", "--tolerance-us", "100000", "--pin-script", str(flips)])
    assert cfg.mode == "run-rt" and cfg.wiring == "deployment"
    assert cfg.tolerance == 100_000 and cfg.pin_script == str(flips)


@pytest.mark.parametrize("argv", [
    ["simulate", "blinky", "--duration", "-1"],
    ["simulate", "blinky", "--duration", "0"],
    ["simulate", "blinky"],
    ["simulate", "traffic", "--duration", "1"],
    ["simulate", "blinky", "--duration", "1", "--bogus"],
    ["simulate", "blinky", "--duration", "1", "--gen-script", "3,2"],
    ["simulate", "blinky", "--duration", "1", "--gen-script", "3", "--pin-script", "x"],
    ["run-rt", "blinky", "--duration", "1", "--tolerance-us", "-5"],
    ["run-rt", "blinky", "--duration", "1", "--pin-script", "/nonexistent/flips.txt"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        parse_args(argv)
    assert info.value.code == 2


def test_pin_script_must_increase(tmp_path):
    flips = tmp_path / "flips.txt"
    flips.write_text("2 1\n1 0\n")
    with pytest.raises(SystemExit):
        parse_args(["run-rt", "blinky", "--duration", "3", "--pin-script", str(flips)])


def test_simulate_table1_trace():
    code, lines, _ = run_cli(["simulate", "blinky", "--duration", "40", "--gen-script", "28.5947"])
    assert code == 0
    assert lines[0] == "time;model_id;model_name;port_name;data"
    for row in ["28.5947;2;generator;out;0", "29.5947;1;blinky;out;0",
                "30.5947;1;blinky;out;1", "31.5947;1;blinky;out;0"]:
        assert row in lines


def test_run_rt_halts_with_zero_tolerance():
    code, lines, err = run_cli(["run-rt", "blinky", "--duration", "3", "--tolerance-us", "0",
                                "--mock-costs", "0,600000"])
    # deployment wiring steps every 100 ms poll: the 0.2 s step ends at 0.8 s,
    # 500 ms past the 0.3 s deadline
    assert code == 1
    assert "accumulated slip 500000 us" in err
    assert lines[-1] == "MISSED SCHEDULED TIME ADVANCE DEADLINE BY:500000 microseconds"


def test_run_rt_empty_script_mock_clock():
    code, lines, _ = run_cli(["run-rt", "blinky", "--duration", "2", "--clock", "mock"])
    assert code == 0
    blinks = [line for line in lines if ";blinky;out;" in line]
    assert len(blinks) == 4  # 0.5, 1, 1.5, 2


def test_run_rt_host_clock_short():
    code, lines, _ = run_cli(["run-rt", "blinky", "--duration", "0.3", "--sigma1", "0.05"])
    assert code == 0
    assert sum(";blinky;out;" in line for line in lines) == 6


def test_mock_run_is_byte_identical(tmp_path):
    flips = tmp_path / "flips.txt"
    flips.write_text("1.55 1\n3.01 0\n")
    argv = ["run-rt", "blinky", "--duration", "6", "--clock", "mock", "--pin-script", str(flips)]
    assert run_cli(argv) == run_cli(argv)


def test_log_file_written(tmp_path):
    path = tmp_path / "out" / "trace.csv"
    code, _, err = run_cli(["simulate", "blinky", "--duration", "2", "--log", str(path)])
    assert code == 1 and "I/O error" in err  # parent directory missing
    path.parent.mkdir()
    code, _, _ = run_cli(["simulate", "blinky", "--duration", "2", "--log", str(path)])
    assert code == 0
    assert path.read_text().startswith("time;model_id;model_name;port_name;data\n")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rtdevs", "simulate", "blinky", "--duration", "1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "1;1;blinky;out;0" in proc.stdout.splitlines()

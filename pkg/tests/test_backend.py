import os
import runpy
import subprocess
import sys
from pathlib import Path

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    env.pop("KBCAT_PURE_NUMPY", None)
    if env_value is not None:
        env["KBCAT_PURE_NUMPY"] = env_value
    out = subprocess.run([sys.executable, "-c", "from kbcat import _kernels; print(_kernels.get_backend())"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_env_switch_selects_numpy():
    assert _backend_in_subprocess("1") == "numpy"
    assert _backend_in_subprocess("0") == "numba"
    assert _backend_in_subprocess(None) == "numba"


def test_benchmark_smoke(capsys):
    ns = runpy.run_path(str(BENCH))
    assert ns["main"](["--sizes", "8", "--repeat", "1", "--window", "1"]) == 0
    assert "numpy" in capsys.readouterr().out

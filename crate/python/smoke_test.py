"""Builds the extension module and exercises it from Python.

    python3 python/smoke_test.py

Uses an already built library when TELEGRAPH_PY_LIB points at it.
"""

import importlib.util
import json
import math
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "telegraph-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libtelegraph_py.so"
    if not lib.exists():
        sys.exit(f"no extension library at {lib}")
    return lib


def load(lib):
    dest = Path(tempfile.mkdtemp()) / "telegraph_py.so"
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("telegraph_py", dest)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def close(a, b, tol=1e-14):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    lib = Path(os.environ["TELEGRAPH_PY_LIB"]) if "TELEGRAPH_PY_LIB" in os.environ else build()
    tp = load(lib)

    p = tp.Params(1.0)
    assert close(p.cumulative_intensity(2.0), math.log(math.cosh(2.0)))
    assert close(p.inverse_cumulative_intensity(p.cumulative_intensity(2.0)), 2.0, 1e-12)

    law = tp.Law(1.0, 1.0)
    assert close(law.atom_mass, 1 / (2 * math.cosh(1.0)))
    assert close(2 * law.atom_mass + law.continuous_mass, 1.0)
    assert close(law.density(0.0), 0.18312688632119108)
    assert law.cdf(1.0) == 1.0 and law.cdf_left(-1.0) == 0.0
    assert law.densities([-2.0, 2.0]) == [0.0, 0.0]
    assert close(tp.cdf(1.0, 1.0, 0.0), 0.5, 1e-9)

    same, flip = tp.velocity_transition(1.0, 1.0)
    assert close(same + flip, 1.0)
    assert close(tp.velocity_covariance(1.0, 0.5, 1.0), 0.53401430763895573)
    assert close(tp.bessel_i0(2.0), 2.2795853023360673)
    assert close(tp.acosh_exp(tp.log_cosh(3.0)), 3.0)

    paths = tp.simulate(1.0, 1.0, 2000, seed=3)
    assert len(paths) == 2000
    assert all(abs(tr.final_position()) <= 1.0 for tr in paths)
    record = json.loads(paths[0].to_json())
    assert record["index"] == 0 and record["seed"] == 3

    counts = [len(tr.events) for tr in paths]
    est = tp.estimate(counts, 1.0)
    assert est.scheme == "replicated" and est.n == 2000
    assert est.ci_low <= est.theta_hat <= est.ci_high
    assert abs(est.theta_hat - 1.0) < 4 * est.std_error
    assert tp.estimate([0, 0, 0], 1.0).degenerate
    assert tp.estimate_single(1, 1.0).std_error is None

    try:
        tp.Params(1.0, c=-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative speed accepted")

    passed, report = tp.validate(json.dumps({"n": 50, "experiments": 10, "paths": 500}))
    report = json.loads(report)
    assert report["mode"] == "informational"
    assert isinstance(passed, bool) and passed == report["passed"]

    print("python smoke test passed")


if __name__ == "__main__":
    main()

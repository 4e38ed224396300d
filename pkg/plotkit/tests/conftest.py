"""Golden artifacts for the figure tests.

The fixtures run the sweep CLI itself (the only interface this package
consumes) once per session, at grid sizes small enough to keep the
suite fast while exercising every figure kind. The band sweep uses an
odd momentum grid so its output contains the k = 0 row, which the
sweep reports with a non-ok status; that row is the masked-cell case.
"""

import subprocess
import sys

import pytest


def run_sweep(out_dir, name, lines):
    cfg = out_dir / f"{name}.cfg"
    cfg.write_text("".join(f"{line}\n" for line in lines))
    out = out_dir / f"{name}.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "zmaplab", lines[0].split("=")[1].strip(),
         "--config", str(cfg), "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def golden(tmp_path_factory):
    d = tmp_path_factory.mktemp("golden")
    paths = {
        "spin-map-half": run_sweep(d, "spin-map-half", [
            "experiment = spin-map", "species = half", "channel = -1/2",
            "method = both", "n_cycles = 60",
            "map.theta_points = 15", "map.phi_points = 15",
        ]),
        "spin-map-one": run_sweep(d, "spin-map-one", [
            "experiment = spin-map", "species = one", "channel = -1",
            "method = closed-form",
            "map.theta_points = 15", "map.phi_points = 15",
        ]),
        "spin-osc-half": run_sweep(d, "spin-osc-half", [
            "experiment = spin-osc", "species = half",
            "osc.f_points = 250", "osc.theta_list = 1.5708, 3.0",
        ]),
        "spin-osc-one": run_sweep(d, "spin-osc-one", [
            "experiment = spin-osc", "species = one", "channel = -1",
            "osc.f_points = 250", "osc.theta_list = 1.5708, 3.0",
        ]),
        "band-sweep": run_sweep(d, "band-sweep", [
            "experiment = band-sweep",
            "band.k_points = 41", "band.steps = 3000",
        ]),
        "bias-sweep": run_sweep(d, "bias-sweep", [
            "experiment = bias-sweep", "bias.eps0_points = 7",
            "band.k_points = 11", "band.steps = 2500",
        ]),
    }
    return paths

import subprocess
import sys

import pytest

# Tiny-scale configs for generating real run directories through the
# producer's CLI (its documented external interface).
_CONFIGS = {
    "grape": """\
task = grape

[system]
n_slices = 16

[grape]
n_iterations = 30
""",
    "pareto": """\
task = pareto

[system]
n_slices = 16

[grape]
n_iterations = 10
""",
    "noise-sweep": """\
task = noise-sweep

[system]
n_slices = 16

[grape]
n_iterations = 10

[noise]
points = 6
ma_window = 3
""",
    "geodesic": """\
task = geodesic

[system]
n_slices = 16

[grape]
n_iterations = 10
""",
}


def _produce(tmp_path, task):
    cfg = tmp_path / f"{task}.cfg"
    out = tmp_path / f"run_{task}"
    cfg.write_text(_CONFIGS[task])
    result = subprocess.run(
        [sys.executable, "-m", "eopulse.cli", task, "--config", str(cfg),
         "--fast", "--out", str(out)],
        capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    return out


@pytest.fixture(scope="session")
def grape_run(tmp_path_factory):
    return _produce(tmp_path_factory.mktemp("grape"), "grape")


@pytest.fixture(scope="session")
def pareto_run(tmp_path_factory):
    return _produce(tmp_path_factory.mktemp("pareto"), "pareto")


@pytest.fixture(scope="session")
def noise_run(tmp_path_factory):
    return _produce(tmp_path_factory.mktemp("noise"), "noise-sweep")


@pytest.fixture(scope="session")
def geodesic_run(tmp_path_factory):
    return _produce(tmp_path_factory.mktemp("geodesic"), "geodesic")

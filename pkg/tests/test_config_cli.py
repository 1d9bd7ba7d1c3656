import math
from pathlib import Path

import numpy as np
import pytest

from eopulse.cli import main, run
from eopulse.config import (
    ConfigError,
    apply_fast,
    build_system,
    build_target,
    parse_config,
    serialize_config,
)
from eopulse.gates import CNOT, HADAMARD, RX_PI_2, T_GATE, control_operator, target_gate
from eopulse.qmath import pauli, tensor


class TestGatesTable:
    def test_textbook_matrices(self):
        s = 1 / math.sqrt(2)
        assert np.allclose(HADAMARD, [[s, s], [s, -s]])
        assert np.allclose(T_GATE, np.diag([1, np.exp(1j * np.pi / 4)]))
        assert np.allclose(CNOT, [[1, 0, 0, 0], [0, 1, 0, 0],
                                  [0, 0, 0, 1], [0, 0, 1, 0]])
        assert np.allclose(RX_PI_2 @ RX_PI_2,
                           np.array([[0, -1j], [-1j, 0]]), atol=1e-12)  # Rx(pi)

    def test_all_named_gates_unitary(self):
        for name in ("hadamard", "t", "rx_pi_2", "identity"):
            g = target_gate(name, 1)
            assert np.allclose(g @ g.conj().T, np.eye(2), atol=1e-12)
        g = target_gate("cnot", 2)
        assert np.allclose(g @ g.conj().T, np.eye(4), atol=1e-12)

    def test_haar_target_deterministic(self):
        assert np.array_equal(target_gate("haar", 2, 5), target_gate("haar", 2, 5))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            target_gate("cnot", 1)

    def test_control_vocabulary(self):
        assert np.allclose(control_operator("sx", 1), pauli("x", 0, 1))
        assert np.allclose(control_operator("sy2", 2), pauli("y", 1, 2))
        assert np.allclose(control_operator("sxsx", 2),
                           tensor(pauli("x", 0, 1), pauli("x", 0, 1)))
        with pytest.raises(ValueError):
            control_operator("sq", 1)
        with pytest.raises(ValueError):
            control_operator("sx3", 2)


class TestParseConfig:
    def test_minimal_defaults(self):
        cfg = parse_config("task = grape")
        assert cfg.task == "grape"
        assert cfg.system.n_qubits == 1
        assert cfg.target.gate == "hadamard"
        assert cfg.grape.n_iterations == 500
        assert math.isinf(cfg.system.t1)

    def test_roundtrip_all_tasks(self):
        for task in ("grape", "drlpe", "pareto", "noise-sweep", "geodesic"):
            cfg = parse_config(None, task_override=task)
            assert parse_config(serialize_config(cfg)) == cfg

    def test_unphysical_t2_names_field_and_line(self):
        text = "task = grape\n\n[system]\nt1 = 1.0\nt2 = 3.0\n"
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert err.value.field_path == "system.t2"
        assert err.value.line == 5

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config("task = grape\n\n[grape]\nlearning_momentum = 3\n")
        assert err.value.field_path == "grape.learning_momentum"
        assert err.value.line == 4

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("[solver]\nx = 1\n")

    def test_unknown_task(self):
        with pytest.raises(ConfigError):
            parse_config("task = annealing")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError):
            parse_config("task = grape\ntask = drlpe")

    def test_bad_value_type(self):
        with pytest.raises(ConfigError) as err:
            parse_config("task = grape\n\n[system]\nn_slices = many\n")
        assert err.value.field_path == "system.n_slices"

    def test_comments_and_blank_lines(self):
        cfg = parse_config("# a recipe\ntask = grape\n\n[grape]\nseed = 4  # four\n")
        assert cfg.grape.seed == 4

    def test_gate_arity_checked(self):
        with pytest.raises(ConfigError):
            parse_config("task = grape\n\n[target]\ngate = cnot\n")

    def test_bad_control_token(self):
        with pytest.raises(ConfigError) as err:
            parse_config("task = grape\n\n[system]\ncontrols = sx,bad\n")
        assert err.value.field_path == "system.controls"

    def test_apply_fast(self):
        cfg = parse_config(None, task_override="grape")
        fast = apply_fast(cfg)
        assert fast.grape.n_iterations == cfg.grape.n_iterations // 10
        assert fast.drlpe.n_episodes == cfg.drlpe.n_episodes // 10

    def test_build_system_and_target(self):
        cfg = parse_config(None, task_override="pareto")
        spec = build_system(cfg)
        assert spec.n_qubits == 2
        assert spec.n_controls == 3
        name, u = build_target(cfg)
        assert name == "haar18"
        assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-10)

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            parse_config("no/such/file.cfg")


def _tiny_config(task, outdir, extra=""):
    scales = {
        "grape": "[grape]\nn_iterations = 20\n",
        "drlpe": "[drlpe]\nn_episodes = 40\nhidden_sizes = 16,8\n",
        "pareto": "[grape]\nn_iterations = 5\n\n[pareto]\nweights = 1:0,0.5:0.5\n",
        "noise-sweep": "[grape]\nn_iterations = 10\n\n[noise]\npoints = 3\nma_window = 2\n",
        "geodesic": "[grape]\nn_iterations = 10\n\n[geodesic]\nweights = 1:0,0.5:0.5\n",
    }
    sys_sect = "[system]\nn_slices = 12\n" if task != "pareto" else \
               "[system]\nn_slices = 12\n"
    return f"task = {task}\nout = {outdir}\n\n{sys_sect}\n{scales[task]}{extra}"


class TestCli:
    @pytest.mark.parametrize("task", ["grape", "drlpe", "pareto",
                                      "noise-sweep", "geodesic"])
    def test_each_task_runs(self, task, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        out = tmp_path / "out"
        cfg_file.write_text(_tiny_config(task, out))
        assert main([task, "--config", str(cfg_file)]) == 0
        assert (out / "results.csv").exists()
        assert (out / "manifest.txt").exists()
        assert (out / "config.cfg").exists()
        assert any((out / "pulses").iterdir())

    def test_drlpe_warm_start_path(self, tmp_path):
        cfg_file = tmp_path / "warm.cfg"
        out = tmp_path / "warm_out"
        cfg_file.write_text(
            f"task = drlpe\nout = {out}\n\n[system]\nn_slices = 10\n\n"
            "[grape]\nn_iterations = 30\n\n"
            "[drlpe]\nn_episodes = 60\nimitation_episodes = 120\n"
            "hidden_sizes = 16,8\nwarm_start = true\n")
        assert main(["drlpe", "--config", str(cfg_file)]) == 0
        results = (out / "results.csv").read_text()
        assert "EO-DRLPE+warm" in results

    def test_fast_flag_scales_trace(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        out = tmp_path / "fastrun"
        cfg_file.write_text(_tiny_config("grape", out).replace(
            "n_iterations = 20", "n_iterations = 100"))
        assert main(["grape", "--config", str(cfg_file), "--fast"]) == 0
        lines = (out / "trace.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 10  # header + N_G/10 rows

    def test_invalid_config_no_partial_dir(self, tmp_path):
        cfg_file = tmp_path / "bad.cfg"
        out = tmp_path / "never"
        cfg_file.write_text(
            f"task = grape\nout = {out}\n\n[system]\nt1 = 1.0\nt2 = 5.0\n")
        assert main(["grape", "--config", str(cfg_file)]) == 2
        assert not out.exists()

    def test_geodesic_trajectory_rows(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        out = tmp_path / "geo"
        cfg_file.write_text(_tiny_config("geodesic", out))
        assert main(["geodesic", "--config", str(cfg_file)]) == 0
        traj_files = sorted((out / "trajectories").iterdir())
        assert len(traj_files) == 2
        lines = traj_files[0].read_text().strip().splitlines()
        assert len(lines) == 1 + 12 + 1  # header + (N + 1) points

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        cfg_file.write_text(_tiny_config("noise-sweep", out1))
        assert main(["noise-sweep", "--config", str(cfg_file)]) == 0
        assert main(["noise-sweep", "--config", str(cfg_file),
                     "--out", str(out2)]) == 0
        for rel in ("results.csv", "pulses/row000.csv", "config.cfg"):
            a = (out1 / rel).read_bytes()
            b = (out2 / rel).read_bytes()
            # config echoes differ only in the out path
            if rel == "config.cfg":
                a = a.replace(str(out1).encode(), b"X")
                b = b.replace(str(out2).encode(), b"X")
            assert a == b, rel

    def test_target_and_seed_overrides(self, tmp_path):
        out = tmp_path / "ov"
        assert main(["grape", "--target", "t", "--seed", "9",
                     "--out", str(out), "--fast"]) == 0
        echoed = (out / "config.cfg").read_text()
        assert "gate = t" in echoed
        assert "seed = 9" in echoed

    def test_unknown_target_override_fails_cleanly(self, tmp_path):
        out = tmp_path / "nope"
        assert main(["grape", "--target", "toffoli", "--out", str(out)]) == 2
        assert not out.exists()

    def test_env_var_out_dir(self, tmp_path, monkeypatch):
        out = tmp_path / "fromenv"
        monkeypatch.setenv("EOPULSE_OUT", str(out))
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(_tiny_config("grape", tmp_path / "ignored"))
        assert main(["grape", "--config", str(cfg_file)]) == 0
        assert out.exists()
        assert not (tmp_path / "ignored").exists()

    def test_run_returns_directory(self, tmp_path):
        cfg = parse_config(_tiny_config("grape", tmp_path / "direct"))
        run_dir = run(cfg)
        assert run_dir == Path(tmp_path / "direct")
        assert (run_dir / "trace.csv").exists()

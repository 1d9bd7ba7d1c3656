"""Run configuration: a nested key-value text format with comments.

Sections in brackets, ``key = value`` pairs, ``#`` comments. Unknown keys
are rejected (not ignored) and every violation is reported with its field
path and line number. ``parse_config(serialize_config(cfg))`` round-trips
losslessly. Defaults depend on the task, mirroring the experiment recipes
(1-qubit Hadamard synthesis for grape/drlpe/noise-sweep, the 2-qubit weight
sweep for pareto, the Rx(pi/2) study for geodesic).
"""

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .gates import GATE_NAMES, control_operator, target_gate
from .system import (
    OneQubitIdentity,
    OneQubitZ,
    SystemSpec,
    TwoQubitZZ,
    build_drift,
)

TWO_PI = 2.0 * math.pi

TASKS = ("grape", "drlpe", "pareto", "noise-sweep", "geodesic")

DRIFT_KINDS = ("one_qubit_identity", "one_qubit_z", "two_qubit_zz")


class ConfigError(ValueError):
    """Invalid configuration; carries the offending field path and line."""

    def __init__(self, message: str, field_path: str = "", line: int | None = None):
        self.field_path = field_path
        self.line = line
        where = field_path or "config"
        at = f" (line {line})" if line is not None else ""
        super().__init__(f"{where}{at}: {message}")


@dataclass(frozen=True)
class SystemSection:
    n_qubits: int
    drift: str
    omega1: float
    omega2: float
    j_coupling: float
    controls: tuple
    n_slices: int
    total_time: float
    t1: float
    t2: float


@dataclass(frozen=True)
class TargetSection:
    gate: str
    haar_seed: int


@dataclass(frozen=True)
class GrapeSection:
    w_f: float
    w_e: float
    eps_f: float
    eps_e: float
    n_iterations: int
    seed: int
    init_scale: float


@dataclass(frozen=True)
class DrlpeSection:
    n_episodes: int
    learning_rate: float
    batch_size: int
    baseline_decay: float
    std_start: float
    std_end: float
    seed: int
    w_f: float
    w_e: float
    hidden_sizes: tuple
    momentum: float
    imitation_metric: str
    warm_start: bool
    imitation_episodes: int


@dataclass(frozen=True)
class ParetoSection:
    weights: tuple  # ((w_f, w_e), ...)
    eps_pairs: tuple  # ((eps_f, eps_e), ...)
    seeds: tuple


@dataclass(frozen=True)
class NoiseSection:
    points: int
    hi_factor: float
    lo_factor: float
    method: str
    ma_window: int


@dataclass(frozen=True)
class GeodesicSection:
    methods: tuple
    weights: tuple


@dataclass(frozen=True)
class RunConfig:
    task: str
    out: str
    system: SystemSection
    target: TargetSection
    grape: GrapeSection
    drlpe: DrlpeSection
    pareto: ParetoSection
    noise: NoiseSection
    geodesic: GeodesicSection


def _grid10():
    return tuple((round(1.0 - 0.1 * i, 10), round(0.1 * i, 10)) for i in range(10))


def _defaults(task: str) -> dict:
    """Per-task default field values, keyed by 'section.key'."""
    two_qubit = task == "pareto"
    d = {
        "task": task,
        "out": f"runs/{task}",
        "system.n_qubits": 2 if two_qubit else 1,
        "system.drift": "two_qubit_zz" if two_qubit else "one_qubit_z",
        "system.omega1": 1.0 if two_qubit else TWO_PI,
        "system.omega2": 1.0 if two_qubit else TWO_PI,
        "system.j_coupling": 0.1 if two_qubit else 0.1 * TWO_PI,
        "system.controls": ("sx1", "sx2", "sxsx") if two_qubit else
                           (("sx", "sy") if task == "geodesic" else ("sx",)),
        "system.n_slices": 100,
        "system.total_time": 5 * math.pi if two_qubit else TWO_PI,
        "system.t1": math.inf,
        "system.t2": math.inf,
        "target.gate": {"pareto": "haar", "geodesic": "rx_pi_2"}.get(task, "hadamard"),
        "target.haar_seed": 18,
        "grape.w_f": 0.7 if task == "noise-sweep" else 1.0,
        "grape.w_e": 0.3 if task == "noise-sweep" else 0.0,
        "grape.eps_f": 1.0,
        "grape.eps_e": 100.0,
        "grape.n_iterations": 100 if two_qubit else 500,
        "grape.seed": 0,
        "grape.init_scale": 1.0 if two_qubit else 0.1,
        "drlpe.n_episodes": 10000,
        "drlpe.learning_rate": 0.01,
        "drlpe.batch_size": 32,
        "drlpe.baseline_decay": 0.9,
        "drlpe.std_start": 0.5,
        "drlpe.std_end": 0.05,
        "drlpe.seed": 0,
        "drlpe.w_f": 0.8,
        "drlpe.w_e": 0.2,
        "drlpe.hidden_sizes": (200, 100, 50, 30, 10),
        "drlpe.momentum": 0.9,
        "drlpe.imitation_metric": "sq",
        "drlpe.warm_start": False,
        "drlpe.imitation_episodes": 2000,
        "pareto.weights": _grid10(),
        "pareto.eps_pairs": ((1.0, 100.0),),
        "pareto.seeds": (0,),
        "noise.points": 10,
        "noise.hi_factor": 100.0,
        "noise.lo_factor": 1.0,
        "noise.method": "EO-GRAPE",
        "noise.ma_window": 5,
        "geodesic.methods": ("EO-GRAPE",),
        "geodesic.weights": _grid10(),
    }
    return d


# field path -> parser name
_FIELD_TYPES = {
    "task": "str",
    "out": "str",
    "system.n_qubits": "int",
    "system.drift": "str",
    "system.omega1": "float",
    "system.omega2": "float",
    "system.j_coupling": "float",
    "system.controls": "str_list",
    "system.n_slices": "int",
    "system.total_time": "float",
    "system.t1": "float",
    "system.t2": "float",
    "target.gate": "str",
    "target.haar_seed": "int",
    "grape.w_f": "float",
    "grape.w_e": "float",
    "grape.eps_f": "float",
    "grape.eps_e": "float",
    "grape.n_iterations": "int",
    "grape.seed": "int",
    "grape.init_scale": "float",
    "drlpe.n_episodes": "int",
    "drlpe.learning_rate": "float",
    "drlpe.batch_size": "int",
    "drlpe.baseline_decay": "float",
    "drlpe.std_start": "float",
    "drlpe.std_end": "float",
    "drlpe.seed": "int",
    "drlpe.w_f": "float",
    "drlpe.w_e": "float",
    "drlpe.hidden_sizes": "int_list",
    "drlpe.momentum": "float",
    "drlpe.imitation_metric": "str",
    "drlpe.warm_start": "bool",
    "drlpe.imitation_episodes": "int",
    "pareto.weights": "pair_list",
    "pareto.eps_pairs": "pair_list",
    "pareto.seeds": "int_list",
    "noise.points": "int",
    "noise.hi_factor": "float",
    "noise.lo_factor": "float",
    "noise.method": "str",
    "noise.ma_window": "int",
    "geodesic.methods": "str_list",
    "geodesic.weights": "pair_list",
}

_SECTIONS = ("system", "target", "grape", "drlpe", "pareto", "noise", "geodesic")


def _parse_value(kind: str, raw: str, path: str, line: int):
    raw = raw.strip()
    try:
        if kind == "str":
            return raw
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("true", "false"):
                return raw.lower() == "true"
            raise ValueError("expected true or false")
        if kind == "str_list":
            return tuple(p.strip() for p in raw.split(",") if p.strip())
        if kind == "int_list":
            return tuple(int(p) for p in raw.split(",") if p.strip())
        if kind == "pair_list":
            if raw == "grid10":
                return _grid10()
            pairs = []
            for part in raw.split(","):
                part = part.strip()
                if not part:
                    continue
                a, sep, b = part.partition(":")
                if not sep:
                    raise ValueError(f"expected a:b pair, got {part!r}")
                pairs.append((float(a), float(b)))
            return tuple(pairs)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), path, line) from None
    raise ConfigError(f"unhandled value kind {kind}", path, line)


def _read_pairs(text: str):
    """Raw scan: returns {field_path: (raw_value, line_number)}."""
    pairs = {}
    section = ""
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", section, lineno)
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError("expected 'key = value'",
                              f"{section}.{line}" if section else line, lineno)
        path = f"{section}.{key.strip()}" if section else key.strip()
        if path in pairs:
            raise ConfigError("duplicate key", path, lineno)
        pairs[path] = (value.strip(), lineno)
    return pairs


def _validate(cfg: RunConfig, lines: dict) -> RunConfig:
    def where(path):
        return lines.get(path, (None, None))[1]

    sys_c = cfg.system
    if cfg.task not in TASKS:
        raise ConfigError(f"unknown task {cfg.task!r}; expected one of {TASKS}",
                          "task", where("task"))
    if sys_c.drift not in DRIFT_KINDS:
        raise ConfigError(f"unknown drift {sys_c.drift!r}; expected one of {DRIFT_KINDS}",
                          "system.drift", where("system.drift"))
    expected_q = 2 if sys_c.drift == "two_qubit_zz" else 1
    if sys_c.n_qubits != expected_q:
        raise ConfigError(f"drift {sys_c.drift} requires n_qubits = {expected_q}",
                          "system.n_qubits", where("system.n_qubits"))
    if sys_c.n_slices < 2:
        raise ConfigError("n_slices must be >= 2", "system.n_slices",
                          where("system.n_slices"))
    if not sys_c.total_time > 0:
        raise ConfigError("total_time must be positive", "system.total_time",
                          where("system.total_time"))
    if not (sys_c.t1 > 0 and sys_c.t2 > 0):
        raise ConfigError("t1 and t2 must be positive", "system.t1", where("system.t1"))
    if sys_c.t2 > 2.0 * sys_c.t1:
        raise ConfigError(f"t2 ({sys_c.t2}) exceeds the physical bound 2*t1 "
                          f"({2 * sys_c.t1})", "system.t2", where("system.t2"))
    for token in sys_c.controls:
        try:
            control_operator(token, sys_c.n_qubits)
        except ValueError as exc:
            raise ConfigError(str(exc), "system.controls",
                              where("system.controls")) from None
    if not sys_c.controls:
        raise ConfigError("at least one control is required", "system.controls",
                          where("system.controls"))
    if cfg.target.gate not in GATE_NAMES:
        raise ConfigError(f"unknown gate {cfg.target.gate!r}; expected one of "
                          f"{GATE_NAMES}", "target.gate", where("target.gate"))
    try:
        target_gate(cfg.target.gate, sys_c.n_qubits, cfg.target.haar_seed)
    except ValueError as exc:
        raise ConfigError(str(exc), "target.gate", where("target.gate")) from None
    for sect, w_f, w_e in (("grape", cfg.grape.w_f, cfg.grape.w_e),
                           ("drlpe", cfg.drlpe.w_f, cfg.drlpe.w_e)):
        if w_f < 0 or w_e < 0 or w_f + w_e <= 0:
            raise ConfigError("weights must be non-negative and not both zero",
                              f"{sect}.w_f", where(f"{sect}.w_f"))
    for pair_field, pairs in (("pareto.weights", cfg.pareto.weights),
                              ("geodesic.weights", cfg.geodesic.weights)):
        for w_f, w_e in pairs:
            if w_f < 0 or w_e < 0 or w_f + w_e <= 0:
                raise ConfigError(f"invalid weight pair ({w_f}, {w_e})",
                                  pair_field, where(pair_field))
    if cfg.noise.method not in ("EO-GRAPE", "EO-DRLPE", "EO-DRLPE+warm"):
        raise ConfigError(f"unknown method {cfg.noise.method!r}", "noise.method",
                          where("noise.method"))
    for m in cfg.geodesic.methods:
        if m not in ("EO-GRAPE", "EO-DRLPE", "EO-DRLPE+warm"):
            raise ConfigError(f"unknown method {m!r}", "geodesic.methods",
                              where("geodesic.methods"))
    if cfg.noise.points < 2:
        raise ConfigError("points must be >= 2", "noise.points", where("noise.points"))
    if not cfg.noise.hi_factor >= cfg.noise.lo_factor > 0:
        raise ConfigError("need hi_factor >= lo_factor > 0", "noise.hi_factor",
                          where("noise.hi_factor"))
    if cfg.drlpe.imitation_metric not in ("sq", "l1"):
        raise ConfigError("imitation_metric must be 'sq' or 'l1'",
                          "drlpe.imitation_metric", where("drlpe.imitation_metric"))
    return cfg


def parse_config(source, task_override: str | None = None) -> RunConfig:
    """Parse a config from text, a path, or None (pure defaults).

    Unknown keys are rejected; every reported violation names the field path
    and the line it came from.
    """
    if source is None:
        text = ""
    elif isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                      and (source.endswith(".cfg") or Path(source).exists())):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}", str(source)) from None
    else:
        text = source

    pairs = _read_pairs(text)
    task = task_override or pairs.get("task", ("", None))[0] or "grape"
    defaults = _defaults(task)
    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}; expected one of {TASKS}",
                          "task", pairs.get("task", ("", None))[1])

    values = dict(defaults)
    values["task"] = task
    for path, (raw, lineno) in pairs.items():
        if path not in _FIELD_TYPES:
            raise ConfigError("unknown key", path, lineno)
        if path == "task":
            continue
        values[path] = _parse_value(_FIELD_TYPES[path], raw, path, lineno)

    def sect(name, cls):
        prefix = name + "."
        kwargs = {p[len(prefix):]: v for p, v in values.items() if p.startswith(prefix)}
        return cls(**kwargs)

    cfg = RunConfig(
        task=values["task"],
        out=values["out"],
        system=sect("system", SystemSection),
        target=sect("target", TargetSection),
        grape=sect("grape", GrapeSection),
        drlpe=sect("drlpe", DrlpeSection),
        pareto=sect("pareto", ParetoSection),
        noise=sect("noise", NoiseSection),
        geodesic=sect("geodesic", GeodesicSection),
    )
    return _validate(cfg, pairs)


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ",".join(f"{_fmt_value(a)}:{_fmt_value(b)}" for a, b in value)
        return ",".join(_fmt_value(v) for v in value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(serialize_config(cfg)) == cfg."""
    lines = [f"task = {cfg.task}", f"out = {cfg.out}"]
    for section in _SECTIONS:
        lines.append("")
        lines.append(f"[{section}]")
        obj = getattr(cfg, section)
        for f in fields(obj):
            lines.append(f"{f.name} = {_fmt_value(getattr(obj, f.name))}")
    return "\n".join(lines) + "\n"


def build_system(cfg: RunConfig) -> SystemSpec:
    """Materialize the SystemSpec described by the [system] section."""
    s = cfg.system
    if s.drift == "one_qubit_identity":
        kind = OneQubitIdentity()
    elif s.drift == "one_qubit_z":
        kind = OneQubitZ(s.omega1)
    else:
        kind = TwoQubitZZ(s.omega1, s.omega2, s.j_coupling)
    controls = tuple(control_operator(t, s.n_qubits) for t in s.controls)
    return SystemSpec(s.n_qubits, build_drift(kind, s.n_qubits), controls,
                      tuple(s.controls), s.total_time, s.n_slices, s.t1, s.t2)


def build_target(cfg: RunConfig):
    """Resolve the target gate; returns (display_name, matrix)."""
    name = cfg.target.gate
    mat = target_gate(name, cfg.system.n_qubits, cfg.target.haar_seed)
    if name == "haar":
        name = f"haar{cfg.target.haar_seed}"
    return name, mat


def apply_fast(cfg: RunConfig) -> RunConfig:
    """Desk-scale reduction: iteration and episode counts divided by 10."""
    return replace(
        cfg,
        grape=replace(cfg.grape,
                      n_iterations=max(1, cfg.grape.n_iterations // 10)),
        drlpe=replace(cfg.drlpe,
                      n_episodes=max(1, cfg.drlpe.n_episodes // 10),
                      imitation_episodes=max(1, cfg.drlpe.imitation_episodes // 10)),
    )

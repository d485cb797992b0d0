"""Configuration types, validation, and the flat key-value config format.

The on-disk format is line oriented: `[section]` headers, `key = value`
pairs, `#` comments, and bracketed lists like `[0.5, 5.0]`. Unknown keys
are rejected with the offending line number, and `emit_config` produces
text that parses back to an identical configuration.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field

from .errors import ConfigError

POLICY_TAGS = ("local-only", "random", "greedy", "round-robin", "amarl", "amarl-noattn")
SWEEP_AXES = ("task_prob", "deadline", "num_ieds")


@dataclass
class SystemConfig:
    """Static description of one device/server deployment."""

    num_ieds: int = 50
    num_ess: int = 5
    num_channels: int = 5
    bandwidth_hz: float = 10e6
    interval_s: float = 0.1
    episode_intervals: int = 100
    area_m: float = 100.0
    task_prob: float = 0.5
    size_range_mb: tuple[float, float] = (0.5, 5.0)
    density_range: tuple[float, float] = (0.1, 0.5)  # Gcycles per MB
    deadline_range_s: tuple[float, float] = (0.5, 2.5)
    ied_gpu_hz: tuple[float, float] = (0.5e9, 2.0e9)
    es_gpu_hz: tuple[float, float] = (10e9, 20e9)
    tx_power_w: float = 0.5
    noise_power: float = 1.0  # SNR denominator, normalized
    pathloss_exp: float = 3.0
    fading: bool = True
    seed: int = 0

    def validate(self) -> None:
        for name in ("num_ieds", "num_ess", "num_channels", "episode_intervals"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("bandwidth_hz", "interval_s", "area_m", "tx_power_w",
                     "noise_power", "pathloss_exp"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        if not 0.0 <= self.task_prob <= 1.0:
            raise ConfigError(f"task_prob must be in [0, 1], got {self.task_prob}")
        for name in ("size_range_mb", "density_range", "deadline_range_s",
                     "ied_gpu_hz", "es_gpu_hz"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigError(f"{name} low > high ({lo} > {hi})")
            if not lo > 0:
                raise ConfigError(f"{name} low must be > 0, got {lo}")


@dataclass
class TrainConfig:
    """Hyperparameters for the actor-critic learner."""

    lr_actor: float = 0.001
    lr_critic: float = 0.005
    gamma: float = 0.99
    batch_size: int = 64
    dropout: float = 0.1
    entropy_weight: float = 0.1
    entropy_weight_end: float = 0.01
    smoothing_std: float = 0.2
    polyak: float = 0.01
    gumbel_temp_start: float = 1.0
    gumbel_temp_end: float = 0.3
    grad_clip: float = 5.0  # global L2 cap per update, 0 disables
    episodes: int = 5000
    updates_per_episode: int = 10
    actor_delay: int = 2  # policy/target updates every k-th critic update
    warmup_transitions: int = 5000
    buffer_capacity: int = 48000
    seed: int = 0
    hidden_actor: int = 64
    hidden_state: int = 16
    model_dim: int = 64
    attn_heads: int = 4
    head_hidden: int = 64
    checkpoint_every: int = 0  # 0 = final checkpoint only
    loss_ceiling: float = 1e6
    use_attention: bool = True

    def validate(self) -> None:
        for name in ("lr_actor", "lr_critic", "gumbel_temp_start", "gumbel_temp_end",
                     "loss_ceiling"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.entropy_weight < 0 or self.smoothing_std < 0:
            raise ConfigError("entropy_weight and smoothing_std must be >= 0")
        if self.entropy_weight_end < 0:
            raise ConfigError("entropy_weight_end must be >= 0")
        if self.grad_clip < 0:
            raise ConfigError("grad_clip must be >= 0")
        if not 0.0 < self.polyak <= 1.0:
            raise ConfigError(f"polyak must be in (0, 1], got {self.polyak}")
        for name in ("batch_size", "episodes", "hidden_actor", "hidden_state",
                     "model_dim", "attn_heads", "head_hidden", "actor_delay"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("updates_per_episode", "warmup_transitions", "checkpoint_every"):
            if int(getattr(self, name)) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.buffer_capacity < self.batch_size:
            raise ConfigError("buffer_capacity must be >= batch_size")
        if self.model_dim % self.attn_heads != 0:
            raise ConfigError(
                f"model_dim must be divisible by attn_heads "
                f"({self.model_dim} % {self.attn_heads} != 0)")


@dataclass
class RewardParams:
    """Reward shaping constants shared by rewards and the objective."""

    completion_bonus_s: float = 3.0
    drop_penalty_s: float = 1.0

    def validate(self) -> None:
        if self.drop_penalty_s < 0:
            raise ConfigError("drop_penalty_s must be >= 0")


@dataclass
class ObsParams:
    """Normalization caps for observation entries without natural ranges."""

    queue_cap_mb: float = 50.0
    gain_cap: float = 5.0

    def validate(self) -> None:
        if not self.queue_cap_mb > 0 or not self.gain_cap > 0:
            raise ConfigError("queue_cap_mb and gain_cap must be > 0")


@dataclass
class SweepSpec:
    axis: str = "task_prob"
    values: tuple[float, ...] = (0.3, 0.5, 0.7, 0.9)
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)

    def validate(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got '{self.axis}'")
        if not self.values:
            raise ConfigError("sweep values must be non-empty")
        if not self.seeds:
            raise ConfigError("sweep seeds must be non-empty")
        if self.axis == "num_ieds":
            for v in self.values:
                if v != int(v) or int(v) < 1:
                    raise ConfigError(f"num_ieds sweep values must be integers >= 1, got {v}")


@dataclass
class ExperimentConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    reward: RewardParams = field(default_factory=RewardParams)
    observe: ObsParams = field(default_factory=ObsParams)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    policy: str = "amarl"
    out_dir: str = "runs/exp"
    sim_episodes: int = 30
    eval_episodes: int = 30

    def validate(self) -> None:
        self.system.validate()
        self.train.validate()
        self.reward.validate()
        self.observe.validate()
        self.sweep.validate()
        if self.policy not in POLICY_TAGS:
            raise ConfigError(f"policy must be one of {POLICY_TAGS}, got '{self.policy}'")
        if self.sim_episodes < 1 or self.eval_episodes < 1:
            raise ConfigError("sim_episodes and eval_episodes must be >= 1")


# ---------------------------------------------------------------------------
# Parsing / emitting
# ---------------------------------------------------------------------------

# section -> key -> (attribute, kind)
_SCHEMA: dict[str, dict[str, str]] = {
    "system": {
        "num_ieds": "int", "num_ess": "int", "num_channels": "int",
        "bandwidth_hz": "float", "interval_s": "float", "episode_intervals": "int",
        "area_m": "float", "task_prob": "float",
        "size_range_mb": "pair", "density_range": "pair", "deadline_range_s": "pair",
        "ied_gpu_hz": "pair", "es_gpu_hz": "pair",
        "tx_power_w": "float", "noise_power": "float", "pathloss_exp": "float",
        "fading": "bool", "seed": "int",
    },
    "train": {
        "lr_actor": "float", "lr_critic": "float", "gamma": "float",
        "batch_size": "int", "dropout": "float", "entropy_weight": "float",
        "entropy_weight_end": "float", "smoothing_std": "float", "polyak": "float",
        "gumbel_temp_start": "float", "gumbel_temp_end": "float",
        "grad_clip": "float",
        "episodes": "int", "updates_per_episode": "int", "actor_delay": "int",
        "warmup_transitions": "int", "buffer_capacity": "int", "seed": "int",
        "hidden_actor": "int", "hidden_state": "int", "model_dim": "int",
        "attn_heads": "int", "head_hidden": "int", "checkpoint_every": "int",
        "loss_ceiling": "float", "use_attention": "bool",
    },
    "reward": {
        "completion_bonus_s": "float", "drop_penalty_s": "float",
    },
    "observe": {
        "queue_cap_mb": "float", "gain_cap": "float",
    },
    "sweep": {
        "axis": "str", "values": "float_list", "seeds": "int_list",
    },
    "experiment": {
        "policy": "str", "out_dir": "str", "sim_episodes": "int", "eval_episodes": "int",
    },
}

_SECTION_ATTR = {
    "system": "system", "train": "train", "reward": "reward",
    "observe": "observe", "sweep": "sweep", "experiment": None,
}

_INT_RE = re.compile(r"^[+-]?\d+$")


def _parse_scalar(text: str, kind: str, where: str):
    text = text.strip()
    if kind == "int":
        if not _INT_RE.match(text):
            raise ConfigError(f"{where}: expected an integer, got '{text}'")
        return int(text)
    if kind == "float":
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{where}: expected a number, got '{text}'") from None
    if kind == "bool":
        low = text.lower()
        if low in ("true", "yes", "on"):
            return True
        if low in ("false", "no", "off"):
            return False
        raise ConfigError(f"{where}: expected true/false, got '{text}'")
    if kind == "str":
        return text
    raise ConfigError(f"{where}: unhandled kind '{kind}'")


def _parse_list(text: str, item_kind: str, where: str) -> list:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ConfigError(f"{where}: expected a bracketed list, got '{text}'")
    inner = text[1:-1].strip()
    if not inner:
        return []
    return [_parse_scalar(part, item_kind, where) for part in inner.split(",")]


def _parse_value(text: str, kind: str, where: str):
    if kind == "pair":
        items = _parse_list(text, "float", where)
        if len(items) != 2:
            raise ConfigError(f"{where}: expected exactly 2 values, got {len(items)}")
        return (items[0], items[1])
    if kind == "float_list":
        return tuple(_parse_list(text, "float", where))
    if kind == "int_list":
        return tuple(_parse_list(text, "int", where))
    return _parse_scalar(text, kind, where)


def parse_config_text(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse config text into a fully defaulted, validated ExperimentConfig."""
    cfg = ExperimentConfig()
    section: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SCHEMA:
                raise ConfigError(f"{where}: unknown section '[{name}]'")
            section = name
            continue
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got '{line}'")
        if section is None:
            raise ConfigError(f"{where}: key outside any [section]")
        key, _, value = line.partition("=")
        key = key.strip()
        keys = _SCHEMA[section]
        if key not in keys:
            raise ConfigError(f"{where}: unknown key '{key}' in [{section}]")
        parsed = _parse_value(value, keys[key], f"{where}: {key}")
        target_attr = _SECTION_ATTR[section]
        target = cfg if target_attr is None else getattr(cfg, target_attr)
        setattr(target, key, parsed)
    cfg.validate()
    return cfg


def parse_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return str(value)


def emit_config(cfg: ExperimentConfig) -> str:
    """Render a config as text such that parse(emit(cfg)) == cfg."""
    lines: list[str] = []
    for section, keys in _SCHEMA.items():
        target_attr = _SECTION_ATTR[section]
        target = cfg if target_attr is None else getattr(cfg, target_attr)
        lines.append(f"[{section}]")
        for key in keys:
            lines.append(f"{key} = {_format_value(getattr(target, key))}")
        lines.append("")
    return "\n".join(lines)


def write_config(cfg: ExperimentConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_config(cfg))


def desk_config(seed: int = 0) -> ExperimentConfig:
    """Small deployment preset that trains in minutes on one core."""
    cfg = ExperimentConfig()
    cfg.system = dataclasses.replace(
        cfg.system, num_ieds=8, num_ess=2, num_channels=2, bandwidth_hz=10e6, seed=seed)
    cfg.train = dataclasses.replace(cfg.train, episodes=800, seed=seed)
    cfg.sweep = dataclasses.replace(cfg.sweep, seeds=(0, 1, 2, 3, 4))
    return cfg


def apply_sweep_point(cfg: ExperimentConfig, axis: str, value: float) -> ExperimentConfig:
    """Return a deep copy of `cfg` with one sweep axis applied."""
    out = dataclasses.replace(
        cfg,
        system=dataclasses.replace(cfg.system),
        train=dataclasses.replace(cfg.train),
        reward=dataclasses.replace(cfg.reward),
        observe=dataclasses.replace(cfg.observe),
        sweep=dataclasses.replace(cfg.sweep),
    )
    if axis == "task_prob":
        out.system.task_prob = float(value)
    elif axis == "deadline":
        lo = min(out.system.deadline_range_s[0], float(value))
        out.system.deadline_range_s = (lo, float(value))
    elif axis == "num_ieds":
        out.system.num_ieds = int(value)
    else:
        raise ConfigError(f"unknown sweep axis '{axis}'")
    out.system.validate()
    return out

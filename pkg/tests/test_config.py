"""Config dataclasses, the key-value text format, and sweep points."""

from __future__ import annotations

import dataclasses

import pytest

from edgeoffload.config import (ExperimentConfig, ObsParams, RewardParams,
                                SweepSpec, SystemConfig, TrainConfig,
                                apply_sweep_point, desk_config, emit_config,
                                parse_config, parse_config_text, write_config)
from edgeoffload.errors import ConfigError


def test_defaults_validate():
    ExperimentConfig().validate()
    desk_config().validate()


def test_default_hyperparameters():
    tc = TrainConfig()
    assert tc.lr_actor == 0.001
    assert tc.lr_critic == 0.005
    assert tc.gamma == 0.99
    assert tc.batch_size == 64
    assert tc.dropout == 0.1


def test_default_task_model_ranges():
    sc = SystemConfig()
    assert sc.size_range_mb == (0.5, 5.0)
    assert sc.density_range == (0.1, 0.5)
    assert sc.deadline_range_s == (0.5, 2.5)
    assert sc.interval_s == 0.1
    assert sc.episode_intervals == 100
    assert sc.es_gpu_hz == (10e9, 20e9)
    assert sc.area_m == 100.0


def test_desk_preset():
    cfg = desk_config(seed=3)
    assert cfg.system.num_ieds == 8
    assert cfg.system.num_ess == 2
    assert cfg.system.bandwidth_hz == 10e6
    assert cfg.train.episodes == 800
    assert cfg.system.seed == 3
    assert cfg.train.seed == 3
    assert len(cfg.sweep.seeds) == 5


def test_reward_defaults():
    rp = RewardParams()
    assert rp.completion_bonus_s == 3.0
    assert rp.drop_penalty_s == 1.0


@pytest.mark.parametrize("field,value", [
    ("num_ieds", 0),
    ("bandwidth_hz", 0.0),
    ("bandwidth_hz", -1.0),
    ("task_prob", 1.5),
    ("interval_s", 0.0),
    ("size_range_mb", (5.0, 0.5)),
    ("size_range_mb", (0.0, 5.0)),
])
def test_system_validation_rejects(field, value):
    cfg = dataclasses.replace(SystemConfig(), **{field: value})
    with pytest.raises(ConfigError):
        cfg.validate()


@pytest.mark.parametrize("field,value", [
    ("gamma", 1.5),
    ("gamma", -0.1),
    ("dropout", 1.0),
    ("batch_size", 0),
    ("actor_delay", 0),
    ("lr_actor", 0.0),
    ("loss_ceiling", 0.0),
])
def test_train_validation_rejects(field, value):
    cfg = dataclasses.replace(TrainConfig(), **{field: value})
    with pytest.raises(ConfigError):
        cfg.validate()


def test_sweep_validation():
    with pytest.raises(ConfigError):
        SweepSpec(axis="nope").validate()
    with pytest.raises(ConfigError):
        SweepSpec(values=()).validate()
    with pytest.raises(ConfigError):
        SweepSpec(seeds=()).validate()
    with pytest.raises(ConfigError):
        SweepSpec(axis="num_ieds", values=(10.5,)).validate()
    SweepSpec(axis="num_ieds", values=(10, 20)).validate()


def test_obs_params_validation():
    with pytest.raises(ConfigError):
        ObsParams(queue_cap_mb=0.0).validate()
    with pytest.raises(ConfigError):
        ObsParams(gain_cap=-1.0).validate()


def test_config_text_round_trip():
    cfg = desk_config(seed=11)
    cfg.policy = "greedy"
    cfg.sim_episodes = 7
    text = emit_config(cfg)
    back = parse_config_text(text)
    assert back == cfg


def test_config_file_round_trip(tmp_path):
    cfg = ExperimentConfig()
    cfg.sweep = dataclasses.replace(cfg.sweep, axis="deadline",
                                    values=(0.5, 1.5), seeds=(0, 1))
    path = tmp_path / "exp.ini"
    write_config(cfg, str(path))
    assert parse_config(str(path)) == cfg


def test_parse_rejects_unknown_key():
    cfg = ExperimentConfig()
    text = emit_config(cfg) + "\n[system]\nwarp_factor = 9\n"
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_parse_rejects_bad_scalar():
    text = "[system]\nnum_ieds = banana\n"
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_parse_rejects_unknown_section():
    with pytest.raises(ConfigError):
        parse_config_text("[warp]\nspeed = 1\n")


def test_parsed_config_is_validated():
    with pytest.raises(ConfigError):
        parse_config_text("[system]\ntask_prob = 2.0\n")


def test_apply_sweep_point_task_prob():
    cfg = desk_config()
    out = apply_sweep_point(cfg, "task_prob", 0.7)
    assert out.system.task_prob == 0.7
    assert cfg.system.task_prob != 0.7 or cfg.system.task_prob == 0.5
    assert out is not cfg and out.system is not cfg.system


def test_apply_sweep_point_deadline_sets_max():
    cfg = desk_config()
    out = apply_sweep_point(cfg, "deadline", 1.0)
    assert out.system.deadline_range_s == (0.5, 1.0)
    tight = apply_sweep_point(cfg, "deadline", 0.5)
    assert tight.system.deadline_range_s == (0.5, 0.5)


def test_apply_sweep_point_num_ieds():
    cfg = desk_config()
    out = apply_sweep_point(cfg, "num_ieds", 40)
    assert out.system.num_ieds == 40
    assert out.system.num_ess == cfg.system.num_ess


def test_apply_sweep_point_rejects_unknown_axis():
    with pytest.raises(ConfigError):
        apply_sweep_point(desk_config(), "moon_phase", 1.0)

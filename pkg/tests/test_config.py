import json

import pytest

from gravfield.server.config import (ConfigError, EngineConfig, ServerConfig,
                                     _parse_sink, active_from_word,
                                     active_to_word, load_server_config,
                                     server_config_from_json,
                                     world_config_from_json,
                                     world_config_to_json)
from gravfield.physics.world import WorldConfig


def test_mode_words_roundtrip():
    for word in ("none", "rope", "spring", "magnetic", "all"):
        assert active_to_word(active_from_word(word)) == word
    with pytest.raises(ConfigError):
        active_from_word("plasma")


def test_world_config_json_roundtrip():
    config = world_config_from_json({
        "mode": "all",
        "rope": {"mass_total": 2.0, "elasticity": 0.3, "natural_length": 4.0,
                 "width": 0.1, "node_count": 21},
        "spring": {"stiffness_k": 3.0, "rest_length": 1.5},
        "magnet": {"monopoles": [1, -1, 0, 2], "particle_count": 64},
        "rope_anchors": [0, 2],
        "arena": {"min": [-2, 0, -2], "max": [2, 3, 2]},
    })
    assert config.rope.node_count == 21
    assert config.magnet.monopoles == (1, -1, 0, 2)
    assert config.rope_anchors == (0, 2)
    again = world_config_from_json(world_config_to_json(config))
    assert world_config_to_json(again) == world_config_to_json(config)


def test_world_config_defaults_and_errors():
    assert world_config_from_json({}).active == frozenset()
    with pytest.raises(ConfigError):
        world_config_from_json({"rope": {"mass_total": 99.0}})
    with pytest.raises(ConfigError):
        world_config_from_json({"rope": {"color": "red"}})
    with pytest.raises(ConfigError):
        world_config_from_json({"arena": {"min": [0, 0, 0]}})
    with pytest.raises(ConfigError):
        world_config_from_json({"rope_anchors": [1, 1]})


def test_engine_config_roundtrip_and_schema_gate():
    config = EngineConfig(world=WorldConfig(active=frozenset(["rope"])), seed=7)
    back = EngineConfig.from_json(config.to_json())
    assert back.seed == 7
    assert back.world.active == frozenset(["rope"])
    assert back.to_json() == config.to_json()
    with pytest.raises(ConfigError):
        EngineConfig.from_json({"seed": 7})
    with pytest.raises(ConfigError):
        EngineConfig.from_json({"schema": 2})


def test_engine_config_default_mappings_literal():
    config = EngineConfig.from_json({"schema": 1, "mappings": "default"})
    assert config.build_table().specs[0].mapping_id == "rope.amp"
    with pytest.raises(ConfigError):
        EngineConfig.from_json({"schema": 1, "mappings": {"schema": 9}})


def test_server_config_defaults():
    config = ServerConfig().validate()
    assert (config.pose_port, config.control_port, config.stream_port) == \
        (13601, 13600, 13602)
    assert config.synth_sink == ("127.0.0.1", 9000)
    assert (config.tick_rate, config.snapshot_rate) == (60, 30)


def test_server_config_rejects_other_rates():
    with pytest.raises(ConfigError):
        ServerConfig(tick_rate=50).validate()
    with pytest.raises(ConfigError):
        ServerConfig(snapshot_rate=60).validate()
    with pytest.raises(ConfigError):
        ServerConfig(pose_port=70000).validate()


def test_sink_parsing():
    assert _parse_sink("10.0.0.5:9100") == ("10.0.0.5", 9100)
    assert _parse_sink(["host", 9000]) == ("host", 9000)
    with pytest.raises(ConfigError):
        _parse_sink("nocolon")
    with pytest.raises(ConfigError):
        _parse_sink("host:nan")


def test_server_config_from_json_full():
    config = server_config_from_json({
        "schema": 1, "seed": 3, "world": {"mode": "rope"},
        "pose_port": 0, "control_port": 0, "stream_port": 0,
        "synth_sink": "127.0.0.1:9901", "json_snapshots": True,
        "record": "/tmp/session.gfl"})
    assert config.engine.seed == 3
    assert config.synth_sink == ("127.0.0.1", 9901)
    assert config.json_snapshots is True
    assert config.record_path == "/tmp/session.gfl"
    with pytest.raises(ConfigError):
        server_config_from_json({"schema": 1, "pose_port": "many"})


def test_load_server_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_server_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ConfigError):
        load_server_config(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"schema": 1, "world": {"mode": "spring"}}))
    assert load_server_config(good).engine.world.active == frozenset(["spring"])

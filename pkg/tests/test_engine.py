import json
import struct

import pytest

from gravfield.osc import OscMessage, decode_packet, encode_message
from gravfield.physics.types import MagnetParams
from gravfield.physics.world import WorldConfig
from gravfield.server.config import EngineConfig
from gravfield.server.datagrams import encode_pose_datagram
from gravfield.server.engine import Engine
from gravfield.server.snapshot import decode_snapshot


def rope_engine(**world_kw):
    world_kw.setdefault("active", frozenset(["rope"]))
    return Engine(EngineConfig(world=WorldConfig(**world_kw)))


def feed_two_agents(engine, tick, spread=1.0):
    for aid, x in ((0, -spread), (1, spread)):
        engine.feed_pose(encode_pose_datagram(
            aid, tick, tick * 16667, (x, 1.5, 0.0), (0.0, 0.0, 0.0, 1.0)))


def test_snapshot_rate_arithmetic():
    engine = rope_engine()
    snapshots = []
    for tick in range(1, 601):
        feed_two_agents(engine, tick)
        result = engine.run_tick()
        assert result.tick == tick
        if result.snapshot_bytes:
            snapshots.append(decode_snapshot(result.snapshot_bytes))
    assert len(snapshots) == 300
    assert snapshots[0].tick == 2
    assert snapshots[-1].tick == 600
    assert all(s.tick % 2 == 0 for s in snapshots)


def test_control_event_visible_next_tick_not_earlier():
    engine = rope_engine()
    feed_two_agents(engine, 1)
    engine.run_tick()
    assert engine.config_version == 0
    engine.feed_control("json", json.dumps(
        {"set_param": {"object": "rope", "param": "mass_total", "value": 4.0}}))
    # queued after tick 1 completed: nothing applied yet
    assert engine.world.config.rope.mass_total == 1.0
    feed_two_agents(engine, 2)
    engine.run_tick()
    assert engine.config_version == 1
    assert engine.world.config.rope.mass_total == 4.0


def test_rejected_event_atomic_with_reply():
    engine = rope_engine()
    sink = object()
    engine.feed_control("json", json.dumps(
        {"set_param": {"object": "rope", "param": "mass_total", "value": 50.0}}),
        reply_to=sink)
    result = engine.run_tick()
    assert engine.config_version == 0
    assert engine.world.config.rope.mass_total == 1.0
    assert engine.control_errors == 1
    [(target, reply)] = result.replies
    assert target is sink
    assert reply["error"]["reason"] == "rejected"


def test_last_writer_wins_mode_sequence():
    engine = rope_engine()
    engine.feed_control("json", '{"switch_mode": "magnetic"}')
    engine.feed_control("json", '{"switch_mode": "rope"}')
    engine.run_tick()
    assert engine.world.config.active == frozenset(["rope"])
    assert engine.config_version == 2


def test_osc_control_path_decodes_packets():
    engine = rope_engine()
    engine.feed_control("osc", encode_message(
        OscMessage("/gravfield/rope/elasticity", (0.8,))))
    engine.run_tick()
    assert engine.world.config.rope.elasticity == pytest.approx(0.8, abs=1e-7)


def test_bad_osc_packet_counted_not_fatal():
    engine = rope_engine()
    engine.feed_control("osc", b"\x00\x01\x02")
    engine.run_tick()
    assert engine.control_errors == 1
    assert engine.tick == 1


def test_audio_env_quantized_to_f32():
    engine = rope_engine()
    engine.feed_control("json", '{"audio_env": 0.1}')
    engine.run_tick()
    assert engine.audio_env == struct.unpack(">f", struct.pack(">f", 0.1))[0]
    assert engine.config_version == 0     # audio is input, not config


def test_emission_is_immediate_timetag_bundle():
    engine = rope_engine()
    for tick in (1, 2):
        feed_two_agents(engine, tick)
        result = engine.run_tick()
    bundle = decode_packet(result.osc_out)
    assert bundle.timetag == 1
    addresses = [m.address for m in bundle.elements]
    assert addresses == ["/synth/amp", "/synth/pitch"]
    for m in bundle.elements:
        assert len(m.args) == 1 and isinstance(m.args[0], float)


def test_no_emission_on_odd_ticks():
    engine = rope_engine()
    feed_two_agents(engine, 1)
    result = engine.run_tick()
    assert result.osc_out == b""
    assert result.snapshot_bytes == b""


def test_snapshot_marks_silent_agent_absent_and_rope_frozen():
    engine = rope_engine()
    for tick in range(1, 11):
        feed_two_agents(engine, tick)
        engine.run_tick()
    # agent 1 goes silent for 1.5 s; agent 0 keeps streaming
    result = None
    for tick in range(11, 11 + 90):
        engine.feed_pose(encode_pose_datagram(
            0, tick, tick * 16667, (-1.0, 1.5, 0.0), (0.0, 0.0, 0.0, 1.0)))
        result = engine.run_tick()
    snap = decode_snapshot(result.snapshot_bytes)
    by_id = {a.agent_id: a for a in snap.agents}
    assert by_id[0].present is True
    assert by_id[1].present is False
    [rope_obj] = [o for o in snap.objects if o.kind == "rope"]
    assert rope_obj.frozen is True
    assert "rope.v" not in snap.signals


def test_snapshot_carries_world_state():
    engine = Engine(EngineConfig(world=WorldConfig(
        active=frozenset(["rope", "spring", "magnetic"]),
        magnet=MagnetParams(particle_count=24))))
    for tick in (1, 2):
        feed_two_agents(engine, tick)
        result = engine.run_tick()
    snap = decode_snapshot(result.snapshot_bytes)
    assert snap.mode == 7
    kinds = sorted(o.kind for o in snap.objects)
    assert kinds == ["magnetic", "rope", "spring"]
    [rope_obj] = [o for o in snap.objects if o.kind == "rope"]
    assert len(rope_obj.nodes) == 17
    [mag] = [o for o in snap.objects if o.kind == "magnetic"]
    assert len(mag.particles) == 24
    [spr] = [o for o in snap.objects if o.kind == "spring"]
    assert spr.end_a[0] == pytest.approx(-1.0)
    assert snap.signals["spring.d"] == pytest.approx(2.0)
    for name in ("rope.v", "rope.a", "magnet.d", "audio.env", "group.energy"):
        assert name in snap.signals


def test_snapshot_signals_are_f32_of_frame():
    engine = rope_engine()
    for tick in (1, 2):
        feed_two_agents(engine, tick)
        result = engine.run_tick()
    snap = decode_snapshot(result.snapshot_bytes)
    for name, value in snap.signals.items():
        expected = struct.unpack(">f", struct.pack(">f", result.frame.values[name]))[0]
        assert value == expected


def test_mode_switch_changes_snapshot_mode_byte():
    engine = rope_engine()
    feed_two_agents(engine, 1)
    engine.run_tick()
    engine.feed_control("osc", encode_message(OscMessage("/gravfield/mode", (3,))))
    feed_two_agents(engine, 2)
    result = engine.run_tick()
    snap = decode_snapshot(result.snapshot_bytes)
    assert snap.mode == 3
    assert snap.config_version == 1

from gravfield.physics.world import WorldConfig
from gravfield.server.config import EngineConfig
from gravfield.server.datagrams import encode_pose_datagram
from gravfield.server.engine import Engine
from gravfield.replay.statehash import state_hash


def rope_engine(seed=0, elasticity=0.5):
    world = WorldConfig(active=frozenset(["rope"]))
    if elasticity != 0.5:
        from gravfield.physics.types import RopeParams
        world = WorldConfig(active=frozenset(["rope"]),
                            rope=RopeParams(elasticity=elasticity))
    return Engine(EngineConfig(world=world, seed=seed))


def run(engine, ticks=30, dx=0.0):
    for tick in range(1, ticks + 1):
        for aid, x in ((0, -1.0 + dx), (1, 1.0)):
            engine.feed_pose(encode_pose_datagram(
                aid, tick, tick * 16667, (x, 1.5, 0.0), (0.0, 0.0, 0.0, 1.0)))
        engine.run_tick()
    return engine


def test_hash_is_16_hex_chars():
    h = state_hash(rope_engine())
    assert len(h) == 16
    int(h, 16)


def test_identical_states_equal_hashes():
    a = run(rope_engine())
    b = run(rope_engine())
    assert state_hash(a) == state_hash(b)
    assert state_hash(a, bitwise=True) == state_hash(b, bitwise=True)


def test_below_quantum_difference_equal_hashes():
    a = run(rope_engine())
    b = run(rope_engine())
    b.world.prev_positions[0] = b.world.prev_positions[0] + 1e-7
    assert state_hash(a) == state_hash(b)
    # bitwise mode sees what quantization hides
    assert state_hash(a, bitwise=True) != state_hash(b, bitwise=True)


def test_above_quantum_difference_differs():
    a = run(rope_engine())
    b = run(rope_engine())
    b.world.prev_positions[0] = b.world.prev_positions[0] + 1e-3
    assert state_hash(a) != state_hash(b)


def test_pose_stream_difference_differs():
    a = run(rope_engine())
    b = run(rope_engine(), dx=0.25)
    assert state_hash(a) != state_hash(b)


def test_seed_changes_hash():
    # seeds only matter once the PRNG exists, and it always does
    assert state_hash(rope_engine(seed=1)) != state_hash(rope_engine(seed=2))


def test_config_change_changes_hash():
    assert state_hash(run(rope_engine())) != \
        state_hash(run(rope_engine(elasticity=0.9)))


def test_audio_env_in_hash():
    a, b = rope_engine(), rope_engine()
    b.feed_control("json", '{"audio_env": 0.5}')
    b.run_tick()
    a.run_tick()
    assert state_hash(a) != state_hash(b)


def test_mapping_table_in_hash():
    a, b = rope_engine(), rope_engine()
    b.feed_control("json", '{"remove_mapping": {"mapping_id": "rope.amp"}}')
    a.run_tick()
    b.run_tick()
    assert state_hash(a) != state_hash(b)


def test_tick_count_in_hash():
    a = run(rope_engine(), ticks=30)
    b = run(rope_engine(), ticks=31)
    assert state_hash(a) != state_hash(b)

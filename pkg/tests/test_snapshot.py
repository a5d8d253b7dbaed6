import json
from pathlib import Path

import pytest

from gravfield.server.snapshot import (KNOWN_HASHES, SnapshotError,
                                       SnapshotObject, decode_snapshot,
                                       encode_snapshot, fnv1a32,
                                       snapshot_to_json)

ROOT = Path(__file__).parent.parent / "golden"
GOLDEN = json.loads((ROOT / "gfs1.json").read_text())
FNV = json.loads((ROOT / "fnv1a32.json").read_text())


def inputs_from_json(want):
    agents = [(a["id"], a["present"], a["position"], a["orientation"])
              for a in want["agents"]]
    objects = []
    for o in want["objects"]:
        if o["type"] == "rope":
            objects.append(SnapshotObject("rope", o["frozen"], nodes=o["nodes"]))
        elif o["type"] == "spring":
            objects.append(SnapshotObject(
                "spring", o["frozen"], end_a=tuple(o["end_a"]),
                end_b=tuple(o["end_b"]), d=o["d"], h=o["h"], t=o["t"],
                visual_amplitude=o["visual_amplitude"]))
        else:
            objects.append(SnapshotObject("magnetic", o["frozen"],
                                          particles=o["particles"]))
    return want["tick"], want["mode"], want["config_version"], agents, objects, \
        want["signals"]


@pytest.mark.parametrize("name", [g["name"] for g in GOLDEN])
def test_golden_snapshots_encode_byte_exactly(name):
    golden = next(g for g in GOLDEN if g["name"] == name)
    assert encode_snapshot(*inputs_from_json(golden["decoded"])).hex() == golden["hex"]


@pytest.mark.parametrize("name", [g["name"] for g in GOLDEN])
def test_golden_snapshots_decode(name):
    golden = next(g for g in GOLDEN if g["name"] == name)
    want = golden["decoded"]
    snap = decode_snapshot(bytes.fromhex(golden["hex"]))
    assert snap.tick == want["tick"]
    assert snap.mode == want["mode"]
    assert snap.config_version == want["config_version"]
    assert snapshot_to_json(snap)["agents"] == want["agents"]
    assert snap.signals == want["signals"]
    got_objects = snapshot_to_json(snap)["objects"]
    assert got_objects == want["objects"]


def test_fnv1a32_matches_published_table():
    for name, value in FNV.items():
        if name == "test:empty":
            assert fnv1a32("") == value
        else:
            assert fnv1a32(name) == value
    assert fnv1a32("") == 0x811C9DC5


def test_known_hash_table_covers_canonical_signals():
    assert KNOWN_HASHES[fnv1a32("rope.v")] == "rope.v"
    assert KNOWN_HASHES[fnv1a32("agent.3.speed")] == "agent.3.speed"


def test_unknown_signal_hash_survives_decode():
    raw = encode_snapshot(1, 0, 0, [], [], {"rope.v": 1.0})
    # flip a known hash into an unknown one
    broken = bytearray(raw)
    broken[-8:-4] = (0xDEADBEEF).to_bytes(4, "big")
    snap = decode_snapshot(bytes(broken))
    assert snap.signals == {"hash:deadbeef": 1.0}


def test_decode_rejects_bad_magic():
    with pytest.raises(SnapshotError):
        decode_snapshot(b"NOPE" + bytes(20))


def test_decode_rejects_unknown_object_code():
    raw = bytearray(encode_snapshot(
        1, 1, 0, [], [SnapshotObject("rope", False, nodes=[(0, 0, 0)])], {}))
    offset = 4 + 13 + 1  # magic, header, agent count
    assert raw[offset] == 1
    raw[offset] = 9
    with pytest.raises(SnapshotError) as err:
        decode_snapshot(bytes(raw))
    assert "unknown object code" in str(err.value)


def test_decode_truncation_always_snapshot_error():
    golden = GOLDEN[-1]
    raw = bytes.fromhex(golden["hex"])
    for cut in range(4, len(raw)):
        with pytest.raises(SnapshotError):
            decode_snapshot(raw[:cut])


def test_decode_rejects_trailing_bytes():
    raw = encode_snapshot(1, 0, 0, [], [], {})
    with pytest.raises(SnapshotError):
        decode_snapshot(raw + b"\x00")


def test_roundtrip_large_particle_block():
    particles = [(float(i) * 0.01, 1.0, -2.0) for i in range(500)]
    raw = encode_snapshot(9, 3, 1, [], [
        SnapshotObject("magnetic", False, particles=particles)], {})
    snap = decode_snapshot(raw)
    assert len(snap.objects[0].particles) == 500
    assert snap.objects[0].particles[7][0] == pytest.approx(0.07)


def test_signals_sorted_by_name_in_wire_order():
    raw = encode_snapshot(1, 0, 0, [], [],
                          {"spring.d": 1.0, "rope.v": 2.0, "audio.env": 3.0})
    names = sorted(["spring.d", "rope.v", "audio.env"])
    offset = 4 + 13 + 1 + 1 + 2
    hashes = [int.from_bytes(raw[offset + 8 * i:offset + 8 * i + 4], "big")
              for i in range(3)]
    assert hashes == [fnv1a32(n) for n in names]

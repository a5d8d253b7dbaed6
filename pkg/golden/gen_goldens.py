"""Generate shared golden wire vectors.

Standalone and dependency-free on purpose: every byte layout here is
hand-laid from the wire contracts (OSC 1.0, GFP1 pose datagrams, GFS1
snapshots) using only struct, so the vectors are independent of the
package implementation they test. Both the Python suite and the
console suite consume the emitted JSON files.

Run from the repository root:  python3 golden/gen_goldens.py
"""

import json
import struct
from pathlib import Path

OUT = Path(__file__).resolve().parent


def pad4(b: bytes) -> bytes:
    return b + b"\x00" * (-len(b) % 4)


def osc_string(s: str) -> bytes:
    # NUL terminator, then pad to a 4-byte boundary
    return pad4(s.encode("ascii") + b"\x00")


def osc_message(address: str, args) -> bytes:
    tags = ","
    payload = b""
    for kind, value in args:
        tags += kind
        if kind == "i":
            payload += struct.pack(">i", value)
        elif kind == "f":
            payload += struct.pack(">f", value)
        elif kind == "s":
            payload += osc_string(value)
        elif kind == "b":
            payload += pad4(struct.pack(">I", len(value)) + bytes(value))
    return osc_string(address) + osc_string(tags) + payload


def osc_bundle(timetag: int, elements) -> bytes:
    out = osc_string("#bundle") + struct.pack(">Q", timetag)
    for el in elements:
        out += struct.pack(">I", len(el)) + el
    return out


def fnv1a32(name: str) -> int:
    h = 0x811C9DC5
    for byte in name.encode("ascii"):
        h ^= byte
        h = (h * 0x01000193) & 0xFFFFFFFF
    return h


# ---------------------------------------------------------------- OSC

msg_a = osc_message("/a", [("f", 1.0)])
assert msg_a.hex() == "2f6100002c6600003f800000", msg_a.hex()
assert len(msg_a) == 12

msg_mode = osc_message("/gravfield/mode", [("i", 2)])
assert len(msg_mode) % 4 == 0 and msg_mode[-4:] == b"\x00\x00\x00\x02"

msg_ping = osc_message("/ping", [])

bundle_one = osc_bundle(1, [msg_a])

osc_vectors = [
    {
        "name": "msg_float_a",
        "hex": msg_a.hex(),
        "message": {"address": "/a", "args": [["f", 1.0]]},
    },
    {
        "name": "msg_mode_int",
        "hex": msg_mode.hex(),
        "message": {"address": "/gravfield/mode", "args": [["i", 2]]},
    },
    {
        "name": "msg_ping_empty",
        "hex": msg_ping.hex(),
        "message": {"address": "/ping", "args": []},
    },
    {
        "name": "msg_string_blob",
        "hex": osc_message("/m/x", [("s", "hi"), ("b", [1, 2, 3]), ("i", -7)]).hex(),
        "message": {
            "address": "/m/x",
            "args": [["s", "hi"], ["b", [1, 2, 3]], ["i", -7]],
        },
    },
    {
        "name": "bundle_immediate_one",
        "hex": bundle_one.hex(),
        "bundle": {
            "timetag": 1,
            "elements": [{"address": "/a", "args": [["f", 1.0]]}],
        },
    },
]

# --------------------------------------------------------- pose (GFP1)

POSE = struct.Struct(">4sB3sIQ3f4f")
assert POSE.size == 48

pose_bytes = POSE.pack(
    b"GFP1", 0, b"\x00\x00\x00", 7, 12_000_000,
    1.0, 2.0, 3.0,
    0.0, 0.0, 0.0, 1.0,
)
pose_vectors = [
    {
        "name": "pose_agent0_seq7",
        "hex": pose_bytes.hex(),
        "decoded": {
            "agent_id": 0,
            "seq": 7,
            "timestamp_us": 12_000_000,
            "position": [1.0, 2.0, 3.0],
            "orientation": [0.0, 0.0, 0.0, 1.0],
        },
    },
]

# ----------------------------------------------------- snapshot (GFS1)

def gfs1(tick, mode, version, agents, objects, signals) -> bytes:
    out = b"GFS1" + struct.pack(">QBI", tick, mode, version)
    out += struct.pack(">B", len(agents))
    for aid, present, pos, quat in agents:
        out += struct.pack(">BB3f4f", aid, 1 if present else 0, *pos, *quat)
    out += struct.pack(">B", len(objects))
    for obj in objects:
        kind = obj["type"]
        code = {"rope": 1, "spring": 2, "magnetic": 3}[kind]
        out += struct.pack(">BB", code, 1 if obj["frozen"] else 0)
        if kind == "rope":
            out += struct.pack(">H", len(obj["nodes"]))
            for n in obj["nodes"]:
                out += struct.pack(">3f", *n)
        elif kind == "spring":
            out += struct.pack(">3f3f4f", *obj["end_a"], *obj["end_b"],
                               obj["d"], obj["h"], obj["t"],
                               obj["visual_amplitude"])
        else:
            out += struct.pack(">I", len(obj["particles"]))
            for p in obj["particles"]:
                out += struct.pack(">3f", *p)
    names = sorted(signals)
    out += struct.pack(">H", len(names))
    for name in names:
        out += struct.pack(">If", fnv1a32(name), signals[name])
    return out


IDENT = [0.0, 0.0, 0.0, 1.0]

snap_rope = {
    "tick": 7,
    "mode": 1,
    "config_version": 3,
    "agents": [
        {"id": 0, "present": True, "position": [1.0, 1.5, -2.0], "orientation": IDENT},
        {"id": 1, "present": False, "position": [-1.0, 1.5, 0.0], "orientation": IDENT},
    ],
    "objects": [
        {
            "type": "rope", "frozen": False,
            "nodes": [[1.0, 1.5, -2.0], [0.0, 1.25, -1.0], [-1.0, 1.5, 0.0]],
        },
    ],
    "signals": {"rope.a": 0.25, "rope.v": 0.5},
}

snap_multi = {
    "tick": 100,
    "mode": 7,
    "config_version": 9,
    "agents": [
        {"id": 0, "present": True, "position": [0.5, 1.75, 0.0], "orientation": IDENT},
        {"id": 1, "present": True, "position": [-0.5, 1.25, 0.0], "orientation": IDENT},
        {"id": 2, "present": True, "position": [2.0, 1.5, 2.0], "orientation": IDENT},
    ],
    "objects": [
        {
            "type": "rope", "frozen": True,
            "nodes": [[0.5, 1.75, 0.0], [0.0, 1.5, 0.0], [-0.5, 1.25, 0.0]],
        },
        {
            "type": "spring", "frozen": False,
            "end_a": [0.5, 1.75, 0.0], "end_b": [-0.5, 1.25, 0.0],
            "d": 1.0, "h": 0.5, "t": 0.0, "visual_amplitude": 0.25,
        },
        {
            "type": "magnetic", "frozen": False,
            "particles": [[0.0, 1.0, 0.0], [0.5, 1.5, -2.5]],
        },
    ],
    "signals": {"magnet.d": 5.0, "spring.d": 1.0, "spring.h": 0.5},
}


def encode_decl(decl) -> str:
    return gfs1(
        decl["tick"], decl["mode"], decl["config_version"],
        [(a["id"], a["present"], a["position"], a["orientation"])
         for a in decl["agents"]],
        decl["objects"],
        decl["signals"],
    ).hex()


gfs1_vectors = [
    {"name": "snap_rope_minimal", "hex": encode_decl(snap_rope), "decoded": snap_rope},
    {"name": "snap_all_objects", "hex": encode_decl(snap_multi), "decoded": snap_multi},
]

# ------------------------------------------------------------- fnv1a32

CANONICAL = [
    "rope.v", "rope.a", "spring.d", "spring.h", "spring.t", "magnet.d",
    "audio.env", "group.energy",
    "agent.0.speed", "agent.1.speed", "agent.2.speed", "agent.3.speed",
]
fnv_table = {name: fnv1a32(name) for name in CANONICAL}
fnv_table["test:empty"] = fnv1a32("")


def dump(name, payload):
    path = OUT / name
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    print(f"wrote {path} ({path.stat().st_size} bytes)")


dump("osc.json", osc_vectors)
dump("pose.json", pose_vectors)
dump("gfs1.json", gfs1_vectors)
dump("fnv1a32.json", fnv_table)

from .config import (ConfigError, EngineConfig, ServerConfig,
                     load_server_config, make_rng, server_config_from_json)
from .datagrams import (ClientRegistry, DatagramError, PoseDatagram,
                        encode_pose_datagram, parse_pose_datagram)
from .engine import Engine, TickResult
from .snapshot import (Snapshot, SnapshotObject, decode_snapshot,
                       encode_snapshot, fnv1a32, snapshot_to_json)

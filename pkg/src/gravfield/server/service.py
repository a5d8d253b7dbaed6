"""Live session server: UDP ingest, 60 Hz loop, OSC out, WS fan-out.

Single asyncio loop owns everything. Datagram callbacks only append to
engine queues; the tick task is the sole mutator of simulation state.
Subscribers get snapshots through bounded drop-oldest queues so a slow
console can never stall the loop, and the synth sink is fire-and-forget
UDP with errors counted, never raised.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import threading
from http import HTTPStatus

from websockets.asyncio.server import serve as ws_serve

from ..physics.types import MagnetParams, RopeParams, SpringParams
from ..replay.sessionlog import SessionLogWriter
from .config import ServerConfig, active_to_word
from .engine import Engine
from .snapshot import decode_snapshot, snapshot_to_json

SUBSCRIBER_QUEUE_LIMIT = 8
BIND_HOST = "0.0.0.0"
WS_PATH = "/ws"


class _PosesIn(asyncio.DatagramProtocol):
    def __init__(self, engine):
        self.engine = engine

    def datagram_received(self, data, addr):
        self.engine.feed_pose(data)


class _ControlIn(asyncio.DatagramProtocol):
    def __init__(self, engine):
        self.engine = engine

    def datagram_received(self, data, addr):
        self.engine.feed_control("osc", data)


class _SinkOut(asyncio.DatagramProtocol):
    """Connected UDP to the synth; ICMP rejections are counted only."""

    def __init__(self):
        self.errors = 0

    def error_received(self, exc):
        self.errors += 1


class _Subscriber:
    def __init__(self, ws):
        self.ws = ws
        self.queue = asyncio.Queue(maxsize=SUBSCRIBER_QUEUE_LIMIT)
        self.dropped = 0

    def offer(self, item):
        if self.queue.full():
            # drop the oldest snapshot; a late console wants fresh state
            with contextlib.suppress(asyncio.QueueEmpty):
                self.queue.get_nowait()
            self.dropped += 1
        self.queue.put_nowait(item)

    async def pump(self):
        while True:
            await self.ws.send(await self.queue.get())


def _param_ranges() -> dict:
    return {
        "rope": {name: list(bounds) for name, bounds in RopeParams.RANGES.items()},
        "spring": {name: list(bounds) for name, bounds in SpringParams.RANGES.items()},
        "magnet": dict(
            {name: list(bounds) for name, bounds in MagnetParams.RANGES.items()},
            strength=list(MagnetParams.MONOPOLE_RANGE)),
    }


class LiveServer:
    def __init__(self, config: ServerConfig):
        self.config = config.validate()
        self.recorder = None
        self.engine = Engine(config.engine)
        self.subscribers = set()
        self.pose_port = config.pose_port
        self.control_port = config.control_port
        self.stream_port = config.stream_port
        self.sink_errors = 0
        self.snapshots_published = 0
        self._stop = None

    def stop(self):
        if self._stop is not None:
            self._stop.set()

    def _hello(self) -> dict:
        return {"hello": {
            "schema": 1,
            "config_version": self.engine.config_version,
            "mode": active_to_word(self.engine.world.config.active),
            "tick": self.engine.tick,
            "ranges": _param_ranges(),
        }}

    async def _handle_ws(self, ws):
        sub = _Subscriber(ws)
        self.subscribers.add(sub)
        pump = asyncio.create_task(sub.pump())
        try:
            await ws.send(json.dumps(self._hello()))
            async for message in ws:
                if isinstance(message, str):
                    self.engine.feed_control("json", message, reply_to=sub)
        except Exception:
            pass
        finally:
            self.subscribers.discard(sub)
            pump.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await pump

    async def _tick_loop(self, sink_transport, max_ticks):
        loop = asyncio.get_running_loop()
        period = 1.0 / self.config.tick_rate
        next_t = loop.time() + period
        json_mode = self.config.json_snapshots
        while not self._stop.is_set():
            if max_ticks is not None and self.engine.tick >= max_ticks:
                break
            result = self.engine.run_tick()
            if result.osc_out and sink_transport is not None:
                try:
                    sink_transport.sendto(result.osc_out)
                except OSError:
                    self.sink_errors += 1
            if result.snapshot_bytes:
                payload = result.snapshot_bytes
                if json_mode:
                    payload = json.dumps(
                        snapshot_to_json(decode_snapshot(result.snapshot_bytes)))
                for sub in tuple(self.subscribers):
                    sub.offer(payload)
                self.snapshots_published += 1
            for reply_to, obj in result.replies:
                reply_to.offer(json.dumps(obj))

            now = loop.time()
            delay = next_t - now
            if delay > 0:
                try:
                    await asyncio.wait_for(self._stop.wait(), timeout=delay)
                    break
                except asyncio.TimeoutError:
                    pass
            elif delay < -0.25:
                next_t = now   # resync after a long stall instead of bursting
            next_t += period

    async def run(self, ready=None, max_ticks=None):
        """Serve until stop() or max_ticks. ready(self) fires once the
        sockets are bound and real port numbers are known."""
        self._stop = asyncio.Event()
        loop = asyncio.get_running_loop()

        if self.config.record_path and self.recorder is None:
            config_json = self.config.engine.to_json()
            if max_ticks:
                # a bounded session replays to its exact final tick even
                # when the trailing ticks saw no inputs
                config_json["ticks"] = int(max_ticks)
            self.recorder = SessionLogWriter(self.config.record_path,
                                             self.config.engine.seed, config_json)
            self.engine.recorder = self.recorder

        pose_transport, _ = await loop.create_datagram_endpoint(
            lambda: _PosesIn(self.engine),
            local_addr=(BIND_HOST, self.config.pose_port))
        self.pose_port = pose_transport.get_extra_info("sockname")[1]

        control_transport, _ = await loop.create_datagram_endpoint(
            lambda: _ControlIn(self.engine),
            local_addr=(BIND_HOST, self.config.control_port))
        self.control_port = control_transport.get_extra_info("sockname")[1]

        sink_protocol = _SinkOut()
        sink_transport, _ = await loop.create_datagram_endpoint(
            lambda: sink_protocol, remote_addr=self.config.synth_sink)

        def require_ws_path(connection, request):
            if request.path != WS_PATH:
                return connection.respond(HTTPStatus.NOT_FOUND,
                                          f"stream endpoint is {WS_PATH}\n")
            return None

        ws_server = await ws_serve(self._handle_ws, BIND_HOST,
                                   self.config.stream_port,
                                   process_request=require_ws_path)
        self.stream_port = ws_server.sockets[0].getsockname()[1]

        if ready is not None:
            ready(self)
        try:
            await self._tick_loop(sink_transport, max_ticks)
        finally:
            self.sink_errors += sink_protocol.errors
            pose_transport.close()
            control_transport.close()
            sink_transport.close()
            ws_server.close()
            await ws_server.wait_closed()
            if self.recorder is not None:
                self.recorder.close()


class ServerThread:
    """Run a LiveServer on a background event loop; for tests and tools."""

    def __init__(self, config: ServerConfig, max_ticks=None):
        self.server = LiveServer(config)
        self._ready = threading.Event()
        self._loop = None
        self._max_ticks = max_ticks
        self.thread = threading.Thread(target=self._run, daemon=True)
        self.error = None

    def _run(self):
        try:
            asyncio.run(self._main())
        except Exception as exc:   # surfaced via .error in tests
            self.error = exc
            self._ready.set()

    async def _main(self):
        self._loop = asyncio.get_running_loop()
        await self.server.run(ready=lambda s: self._ready.set(),
                              max_ticks=self._max_ticks)

    def start(self, timeout=5.0) -> "ServerThread":
        self.thread.start()
        if not self._ready.wait(timeout):
            raise RuntimeError("server did not become ready")
        if self.error is not None:
            raise self.error
        return self

    def stop(self, timeout=5.0):
        if self._loop is not None:
            try:
                self._loop.call_soon_threadsafe(self.server.stop)
            except RuntimeError:
                pass   # loop already closed; the session ended on its own
        self.thread.join(timeout)

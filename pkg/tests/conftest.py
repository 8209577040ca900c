"""Shared fixtures: in-memory stores, the packaged seed, and a live server."""

from __future__ import annotations

import socket
import threading
import time
from datetime import datetime, timezone

import pytest
from hypothesis import HealthCheck, settings

from twinfm.seed import load_seed
from twinfm.store import TwinStore
from twinfm.telemetry import run_simulation

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

SIM_START = datetime(2024, 3, 1, tzinfo=timezone.utc)


@pytest.fixture()
def store() -> TwinStore:
    """Fresh in-memory store, no log file."""
    return TwinStore()


@pytest.fixture(scope="session")
def seed_events() -> tuple:
    """The event stream produced by loading the packaged seed once."""
    s = TwinStore()
    load_seed(s)
    return tuple(s.events)


@pytest.fixture()
def seeded_store(seed_events) -> TwinStore:
    """Fresh store holding the packaged seed (cheap: replays cached events)."""
    return TwinStore.replay(seed_events)


@pytest.fixture(scope="session")
def simulated_store(seed_events) -> TwinStore:
    """Seed plus one deterministic simulated hour; treat as read-only."""
    s = TwinStore.replay(seed_events)
    run_simulation(s, 42, SIM_START, 3600)
    return s


def free_port() -> int:
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


class LiveServer:
    """A real uvicorn server on an ephemeral port, run in a daemon thread."""

    def __init__(self, app):
        import uvicorn

        self.port = free_port()
        self.base = f"http://127.0.0.1:{self.port}"
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port,
                                log_level="error")
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def __enter__(self) -> "LiveServer":
        self._thread.start()
        deadline = time.monotonic() + 10
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.02)
        return self

    def __exit__(self, *exc) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10)

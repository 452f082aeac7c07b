"""Session-based JSON API around the reduction workbench.

Sessions are event-sourced: the creation parameters plus the ordered op
list fully determine a triplet, so the optional persistence file is an
append-only JSONL log and recovery is replay.  Each session serializes its
mutations behind a lock; different sessions proceed concurrently.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .dirichlet import verify_congruence
from .kernel_oracle import scalar_lift_kernel
from .triplet import Triplet, TripletError


class _Session:
    def __init__(self, sid: str, N: int, M: int):
        self.id = sid
        self.N = N
        self.M = M
        self.triplet = Triplet.from_character_matrix(N, M)
        self.created = time.time()
        self.modified = self.created
        self.lock = threading.Lock()
        self.corrupt: str | None = None


def _reason(status: int, reason: str, **extra: Any) -> JSONResponse:
    return JSONResponse({"reason": reason, **extra}, status_code=status)


def _session_meta(s: _Session) -> dict[str, Any]:
    return {
        "id": s.id,
        "N": s.N,
        "M": s.M,
        "created": s.created,
        "modified": s.modified,
    }


def _snapshot_payload(s: _Session) -> dict[str, Any]:
    snap = s.triplet.snapshot()
    snap["session"] = _session_meta(s)
    return snap


class _Store:
    """Session registry plus the append-only recovery log."""

    def __init__(self, persist_path: str | Path | None):
        self.sessions: dict[str, _Session] = {}
        self.lock = threading.Lock()
        self.persist_path = Path(persist_path) if persist_path else None
        self.write_lock = threading.Lock()
        if self.persist_path and self.persist_path.exists():
            self._recover()

    def _recover(self) -> None:
        with self.persist_path.open() as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                sid = event["id"]
                kind = event["event"]
                if kind == "create":
                    self.sessions[sid] = _Session(sid, event["N"], event["M"])
                elif kind == "delete":
                    self.sessions.pop(sid, None)
                elif kind == "op":
                    session = self.sessions.get(sid)
                    if session is None or session.corrupt:
                        continue
                    try:
                        session.triplet.apply_op(event["kind"], event["args"])
                    except (TripletError, ValueError) as exc:
                        session.corrupt = f"recovery failed on {event['kind']}: {exc}"
                        continue
                    if not session.triplet.assert_invariant():
                        session.corrupt = f"invariant broken replaying {event['kind']}"

    def append(self, event: dict[str, Any]) -> None:
        if self.persist_path is None:
            return
        with self.write_lock:
            with self.persist_path.open("a") as handle:
                handle.write(json.dumps(event) + "\n")
                handle.flush()

    def get(self, sid: str) -> _Session | None:
        with self.lock:
            return self.sessions.get(sid)

    def put(self, session: _Session) -> None:
        with self.lock:
            self.sessions[session.id] = session

    def drop(self, sid: str) -> bool:
        with self.lock:
            return self.sessions.pop(sid, None) is not None


def create_app(persist_path: str | Path | None = None) -> FastAPI:
    """The workbench API; pass persist_path to survive restarts by replay."""
    app = FastAPI(title="character congruence workbench", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = _Store(persist_path)
    app.state.store = store

    def _locked(sid: str):
        """Session by id, or an error response ready to return."""
        session = store.get(sid)
        if session is None:
            return None, _reason(404, "unknown session")
        if session.corrupt:
            return None, _reason(500, session.corrupt)
        return session, None

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        try:
            N = int(payload["N"])
            M = int(payload["M"])
        except (KeyError, TypeError, ValueError):
            return _reason(422, "body must carry integer N and M")
        if N < 2 or M < 2:
            return _reason(422, "need N >= 2 and M >= 2")
        session = _Session(uuid.uuid4().hex[:12], N, M)
        store.put(session)
        store.append({"event": "create", "id": session.id, "N": N, "M": M})
        return {"id": session.id, "snapshot": _snapshot_payload(session)}

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session, err = _locked(sid)
        if err:
            return err
        with session.lock:
            return _snapshot_payload(session)

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        if not store.drop(sid):
            return _reason(404, "unknown session")
        store.append({"event": "delete", "id": sid})
        return Response(status_code=204)

    @app.post("/sessions/{sid}/ops")
    def apply_op(sid: str, payload: dict = Body(...)):
        session, err = _locked(sid)
        if err:
            return err
        kind = payload.get("kind")
        args = payload.get("args", [])
        expected = payload.get("expected_log_length")
        if not isinstance(kind, str) or not isinstance(args, list):
            return _reason(422, "op needs a kind string and an args list")
        if not isinstance(expected, int):
            return _reason(422, "op needs expected_log_length for conflict detection")
        with session.lock:
            actual = len(session.triplet.op_log)
            if expected != actual:
                return _reason(
                    409,
                    "op log moved underneath this request",
                    expected=expected,
                    actual=actual,
                )
            try:
                session.triplet.apply_op(kind, args)
            except (TripletError, ValueError) as exc:
                return _reason(422, str(exc))
            if not session.triplet.assert_invariant():
                session.corrupt = f"invariant broken after {kind}"
                return _reason(500, session.corrupt)
            session.modified = time.time()
            store.append({"event": "op", "id": sid, "kind": kind, "args": args})
            return _snapshot_payload(session)

    @app.post("/sessions/{sid}/check")
    def check_vector(sid: str, payload: dict = Body(...)):
        session, err = _locked(sid)
        if err:
            return err
        coeffs = payload.get("coeffs")
        if not isinstance(coeffs, list):
            return _reason(422, "body must carry a coeffs list")
        with session.lock:
            try:
                ok, vec = session.triplet.check_kernel_vector(coeffs)
            except (TripletError, ValueError) as exc:
                return _reason(422, str(exc))
            full = bool(verify_congruence(session.N, session.M, vec).full_period) if ok else False
            return {
                "in_kernel": ok,
                "vector_or_residual": [a.to_json() for a in vec],
                "full_period": full,
            }

    @app.get("/sessions/{sid}/oracle")
    def oracle(sid: str):
        session, err = _locked(sid)
        if err:
            return err
        with session.lock:
            generators = scalar_lift_kernel(session.triplet.B)
            checked = [
                verify_congruence(session.N, session.M, gen).full_period
                for gen in generators
            ]
            return {
                "generators": [[a.to_json() for a in gen] for gen in generators],
                "checked_full_period": checked,
            }

    return app

"""HTTP API: ask questions, resolve disambiguations, inspect the ontology.

Disambiguation state is session-scoped: an ambiguous /api/ask answer returns
a session id whose pending choice /api/resolve consumes; a session stays
usable while further choices are pending and disappears when idle too long.
The service itself is stateless beyond the session table, so a restart only
loses pending disambiguations. When a built web UI is configured it is served
statically from /.
"""

from __future__ import annotations

import os
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import __version__
from .config import Config
from .mapping import ChoiceIndexError, UnknownTokenError
from .pipeline import NEEDS_DISAMBIGUATION, BadQuestionError, QAEngine


@dataclass
class Session:
    id: str
    pending_token: str | None = None
    touched: float = field(default_factory=time.monotonic)


class SessionStore:
    """Bounded, idle-expiring session table; oldest sessions are evicted."""

    def __init__(self, ttl=600.0, capacity=1024, clock=time.monotonic):
        self._ttl = ttl
        self._capacity = capacity
        self._clock = clock
        self._lock = threading.Lock()
        self._sessions = {}

    def create(self, pending_token: str) -> Session:
        session = Session(secrets.token_hex(16), pending_token, self._clock())
        with self._lock:
            now = self._clock()
            for sid in [s for s, v in self._sessions.items()
                        if v.touched + self._ttl <= now]:
                del self._sessions[sid]
            while len(self._sessions) >= self._capacity:
                self._sessions.pop(next(iter(self._sessions)))
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None or session.touched + self._ttl <= self._clock():
                self._sessions.pop(session_id, None)
                raise KeyError(session_id)
            session.touched = self._clock()
            return session

    def drop(self, session_id: str):
        with self._lock:
            self._sessions.pop(session_id, None)


class AskBody(BaseModel):
    question: str


class ResolveBody(BaseModel):
    session_id: str
    choice: int


def create_app(config: Config | None = None, engine: QAEngine | None = None) -> FastAPI:
    config = config or Config()
    engine = engine or QAEngine(config)
    sessions = SessionStore(ttl=config.get_float("session.ttl"),
                            capacity=config.get_int("session.capacity"))
    app = FastAPI(title="vnqa", version=__version__)

    def respond(result, session: Session | None = None):
        payload = result.to_dict()
        if result.status == NEEDS_DISAMBIGUATION:
            token = payload["disambiguation"].pop("token")
            if session is None:
                session = sessions.create(token)
            else:
                session.pending_token = token
            payload["session_id"] = session.id
        elif session is not None:
            session.pending_token = None
            sessions.drop(session.id)
        return payload

    @app.post("/api/ask")
    def ask(body: AskBody):
        try:
            result = engine.ask(body.question)
        except BadQuestionError as err:
            raise HTTPException(status_code=400, detail=str(err))
        return respond(result)

    @app.post("/api/resolve")
    def resolve(body: ResolveBody):
        try:
            session = sessions.get(body.session_id)
        except KeyError:
            raise HTTPException(status_code=404,
                                detail="unknown or expired session")
        if not session.pending_token:
            raise HTTPException(status_code=409, detail="no pending choice")
        try:
            result = engine.resolve_choice(session.pending_token, body.choice)
        except ChoiceIndexError as err:
            raise HTTPException(status_code=400, detail=str(err))
        except UnknownTokenError:
            sessions.drop(session.id)
            raise HTTPException(status_code=404,
                                detail="pending choice expired, ask again")
        return respond(result, session)

    @app.get("/api/ontology")
    def ontology():
        return {"summary": engine.ontology.summary(),
                "tree": engine.ontology.concept_tree()}

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    ui_dist = config.get("ui.dist")
    if ui_dist and os.path.isdir(ui_dist):
        app.mount("/", StaticFiles(directory=ui_dist, html=True), name="ui")
    return app

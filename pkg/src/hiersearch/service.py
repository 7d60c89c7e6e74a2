"""Persistent interactive labeling sessions.

The service owns uploaded hierarchies, an online frequency learner per
hierarchy, and any number of concurrent question/answer sessions.  Every
mutation is appended to a JSON-lines event log before the caller sees a
response; restart replays the log (optionally fast-forwarded from a
snapshot) and reconstructs every open session's exact pending question.
Replay re-derives each recorded question and refuses to start if the
stored and recomputed questions ever diverge.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from collections import deque

import numpy as np

from . import policies
from .distributions import OnlineLearner, normalize
from .errors import (
    BadDataDir,
    BadParameter,
    OrdinalMismatch,
    SessionClosed,
    UnknownHierarchy,
    UnknownNode,
    UnknownSession,
)
from .hierarchy import ensure_single_root, load_hierarchy
from .policies import POLICY_KINDS

import time as _time

SESSION_MODES = ("offline", "online")


class _HierarchyEntry:
    def __init__(self, hierarchy_id, edges_text, weights_map, costs_map):
        self.hierarchy_id = hierarchy_id
        self.edges_text = edges_text
        self.weights_map = weights_map
        self.costs_map = costs_map
        self.h = ensure_single_root(load_hierarchy(edges_text))
        self.weights = None
        if weights_map:
            self.weights = self._vector(weights_map, "weight", normalize_it=True)
        self.costs = None
        if costs_map:
            self.costs = self._vector(costs_map, "cost", normalize_it=False)
        self.learner = OnlineLearner(self.h.n)
        self.recent_questions = deque(maxlen=512)
        self.resolved = 0
        self.abandoned = 0

    def _vector(self, mapping, what, normalize_it):
        h = self.h
        vec = np.zeros(h.n) if normalize_it else np.ones(h.n)
        seen = set()
        for name, value in mapping.items():
            if name not in h.index:
                raise UnknownNode(f"unknown node {name!r} in {what} map")
            vec[h.index[name]] = float(value)
            seen.add(name)
        if normalize_it:
            if h.synthetic_root:
                vec[h.root] = 0.0
            return normalize(vec)
        if any(v <= 0 for v in vec):
            raise BadParameter(f"{what}s must be positive")
        return vec

    def offline_weights(self):
        if self.weights is not None:
            return self.weights
        p = np.full(self.h.n, 1.0 / self.h.n)
        if self.h.synthetic_root:
            p[self.h.root] = 0.0
            p = normalize(p)
        return p

    def online_weights(self):
        p = self.learner.current()
        if self.h.synthetic_root:
            p[self.h.root] = 0.0
            p = normalize(p)
        return p


class _Session:
    def __init__(self, session_id, entry, policy_kind, mode, object_ref, created_at):
        self.session_id = session_id
        self.entry = entry
        self.policy_kind = policy_kind
        self.mode = mode
        self.object_ref = object_ref
        self.created_at = created_at
        self.updated_at = created_at
        self.status = "open"
        self.answers: list[bool] = []
        self.asked_nodes: list[int] = []
        self.result: int | None = None
        self.state = None
        self.pending = None
        self.last_response: dict | None = None
        # online sessions pin the learner weights seen at creation so a
        # replay after other sessions have resolved recomputes the same
        # questions
        self.frozen_weights: np.ndarray | None = None

    @property
    def pending_ordinal(self) -> int:
        return len(self.answers) + 1


class SessionService:
    """Core session engine; the HTTP layer is a thin adapter over this."""

    def __init__(self, data_dir: str | None = None, ttl_seconds: float = 3600.0,
                 rolling_window: int = 50, snapshot_every: int = 200,
                 clock=_time.time):
        self.ttl_seconds = float(ttl_seconds)
        self.rolling_window = int(rolling_window)
        self.snapshot_every = int(snapshot_every)
        self.clock = clock
        self.hierarchies: dict[str, _HierarchyEntry] = {}
        self.sessions: dict[str, _Session] = {}
        self._lock = threading.RLock()
        self._log = None
        self._events_written = 0
        self._snapshotted_at = 0
        self.data_dir = data_dir
        if data_dir is not None:
            os.makedirs(data_dir, exist_ok=True)
            if not os.path.isdir(data_dir):
                raise BadDataDir(f"not a directory: {data_dir}")
            self._recover()
            self._log = open(self._log_path(), "a", encoding="utf-8")

    # -- persistence ----------------------------------------------------------

    def _log_path(self) -> str:
        return os.path.join(self.data_dir, "events.jsonl")

    def _snapshot_path(self) -> str:
        return os.path.join(self.data_dir, "snapshot.json")

    def _append(self, event: dict) -> None:
        if self._log is None:
            return
        self._log.write(json.dumps(event, separators=(",", ":")) + "\n")
        self._log.flush()
        self._events_written += 1

    def _maybe_snapshot(self) -> None:
        # Only call once the in-memory state reflects every appended event:
        # a snapshot taken between append and apply would claim an event as
        # applied while storing the state from before it.
        if self._log is None:
            return
        if self._events_written - self._snapshotted_at >= self.snapshot_every:
            self._write_snapshot()

    def _write_snapshot(self) -> None:
        if self.data_dir is None:
            return
        snap = {
            "applied": self._events_written,
            "hierarchies": [
                {
                    "id": e.hierarchy_id,
                    "edges": e.edges_text,
                    "weights": e.weights_map,
                    "costs": e.costs_map,
                    "learner": e.learner.snapshot(),
                    "resolved": e.resolved,
                    "abandoned": e.abandoned,
                    "recent": list(e.recent_questions),
                }
                for e in self.hierarchies.values()
            ],
            "sessions": [
                {
                    "id": s.session_id,
                    "h": s.entry.hierarchy_id,
                    "policy": s.policy_kind,
                    "mode": s.mode,
                    "object": s.object_ref,
                    "created": s.created_at,
                    "updated": s.updated_at,
                    "status": s.status,
                    "answers": s.answers,
                    "asked": [s.entry.h.labels[v] for v in s.asked_nodes],
                    "result": None if s.result is None else s.entry.h.labels[s.result],
                    "weights": (None if s.frozen_weights is None
                                else s.frozen_weights.tolist()),
                }
                for s in self.sessions.values()
            ],
        }
        tmp = self._snapshot_path() + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(snap, f)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, self._snapshot_path())
        self._snapshotted_at = self._events_written

    def _recover(self) -> None:
        applied = 0
        snap_path = self._snapshot_path()
        if os.path.exists(snap_path):
            with open(snap_path, encoding="utf-8") as f:
                snap = json.load(f)
            applied = int(snap.get("applied", 0))
            for he in snap.get("hierarchies", []):
                entry = _HierarchyEntry(he["id"], he["edges"],
                                        he.get("weights"), he.get("costs"))
                entry.learner = OnlineLearner.from_snapshot(
                    entry.h.n, he.get("learner", {}))
                entry.resolved = he.get("resolved", 0)
                entry.abandoned = he.get("abandoned", 0)
                entry.recent_questions.extend(he.get("recent", []))
                self.hierarchies[he["id"]] = entry
            for sd in snap.get("sessions", []):
                self._restore_session(sd)
        count = 0
        log_path = self._log_path()
        if os.path.exists(log_path):
            with open(log_path, encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    count += 1
                    if count <= applied:
                        continue
                    self._apply_event(json.loads(line))
        self._events_written = count
        self._snapshotted_at = applied

    def _restore_session(self, sd: dict) -> None:
        entry = self.hierarchies[sd["h"]]
        sess = _Session(sd["id"], entry, sd["policy"], sd["mode"],
                        sd.get("object", ""), sd.get("created", 0.0))
        sess.updated_at = sd.get("updated", sess.created_at)
        sess.status = sd.get("status", "open")
        if sd.get("weights") is not None:
            sess.frozen_weights = np.asarray(sd["weights"], dtype=np.float64)
        answers = [bool(a) for a in sd.get("answers", [])]
        asked = [entry.h.id_of(lab) for lab in sd.get("asked", [])]
        if sess.status == "open":
            self._hydrate(sess)
            for node, ans in zip(asked, answers):
                self._advance(sess, node, ans)
            if sess.status != "open":
                raise BadDataDir(
                    f"session {sess.session_id} resolved during replay")
        else:
            sess.answers = answers
            sess.asked_nodes = asked
            if sd.get("result") is not None:
                sess.result = entry.h.id_of(sd["result"])
        self.sessions[sess.session_id] = sess

    def _apply_event(self, ev: dict) -> None:
        kind = ev.get("e")
        if kind == "hierarchy":
            self._do_add_hierarchy(ev["id"], ev["edges"], ev.get("weights"),
                                   ev.get("costs"))
        elif kind == "session":
            entry = self.hierarchies.get(ev["h"])
            if entry is None:
                raise BadDataDir(f"log references unknown hierarchy {ev['h']!r}")
            sess = _Session(ev["id"], entry, ev["policy"], ev["mode"],
                            ev.get("object", ""), ev.get("ts", 0.0))
            if ev.get("weights") is not None:
                sess.frozen_weights = np.asarray(ev["weights"], dtype=np.float64)
            self._hydrate(sess)
            self.sessions[sess.session_id] = sess
        elif kind == "answer":
            sess = self.sessions.get(ev["id"])
            if sess is None or sess.status != "open":
                raise BadDataDir(f"answer for unknown or closed session {ev.get('id')!r}")
            expect = sess.entry.h.id_of(ev["node"]) if "node" in ev else None
            self._advance(sess, expect, bool(ev["answer"]))
            sess.updated_at = ev.get("ts", sess.updated_at)
        elif kind == "abandon":
            sess = self.sessions.get(ev["id"])
            if sess is not None and sess.status == "open":
                self._mark_abandoned(sess)
        else:
            raise BadDataDir(f"unknown event type {kind!r}")

    # -- engine glue ----------------------------------------------------------

    def _hydrate(self, sess: _Session) -> None:
        entry = sess.entry
        if sess.mode == "online":
            if sess.frozen_weights is None:
                sess.frozen_weights = entry.online_weights()
            weights = sess.frozen_weights
        else:
            weights = entry.offline_weights()
        sess.state = policies.new_search(entry.h, weights, sess.policy_kind,
                                         costs=entry.costs)
        if sess.state.view.live_count <= 1:
            self._resolve(sess)
        else:
            sess.pending = policies.next_question(sess.state)

    def _advance(self, sess: _Session, expect_node: int | None,
                 answer: bool) -> None:
        q = sess.pending
        if expect_node is not None and q.node != expect_node:
            raise BadDataDir(
                f"replay divergence in session {sess.session_id}: stored "
                f"question {sess.entry.h.labels[expect_node]!r}, "
                f"recomputed {sess.entry.h.labels[q.node]!r}")
        policies.apply_answer(sess.state, q, answer)
        sess.answers.append(answer)
        sess.asked_nodes.append(q.node)
        if sess.state.view.live_count == 1:
            self._resolve(sess)
        else:
            sess.pending = policies.next_question(sess.state)

    def _resolve(self, sess: _Session) -> None:
        sess.status = "resolved"
        sess.result = int(sess.state.view.root)
        sess.pending = None
        sess.state = None
        entry = sess.entry
        entry.learner.observe(sess.result)
        entry.resolved += 1
        entry.recent_questions.append(len(sess.answers))

    def _mark_abandoned(self, sess: _Session) -> None:
        sess.status = "abandoned"
        sess.pending = None
        sess.state = None
        sess.entry.abandoned += 1

    # -- public operations ------------------------------------------------------

    def add_hierarchy(self, edges_text: str, hierarchy_id: str | None = None,
                      weights: dict | None = None,
                      costs: dict | None = None) -> dict:
        with self._lock:
            if hierarchy_id is None:
                digest = hashlib.sha1(edges_text.encode("utf-8")).hexdigest()
                hierarchy_id = f"h{digest[:10]}"
            existing = self.hierarchies.get(hierarchy_id)
            if existing is not None:
                if existing.edges_text != edges_text:
                    raise BadParameter(
                        f"hierarchy {hierarchy_id!r} already exists with "
                        "different edges")
                return self._hierarchy_view(existing)
            entry = self._do_add_hierarchy(hierarchy_id, edges_text, weights, costs)
            self._append({"e": "hierarchy", "id": hierarchy_id,
                          "edges": edges_text, "weights": weights,
                          "costs": costs, "ts": self.clock()})
            self._maybe_snapshot()
            return self._hierarchy_view(entry)

    def _do_add_hierarchy(self, hierarchy_id, edges_text, weights, costs):
        entry = _HierarchyEntry(hierarchy_id, edges_text, weights, costs)
        self.hierarchies[hierarchy_id] = entry
        return entry

    def _hierarchy_view(self, entry: _HierarchyEntry) -> dict:
        st = entry.h.stats()
        return {"hierarchy_id": entry.hierarchy_id, "stats": st.as_dict(),
                "labels": list(entry.h.labels),
                "has_weights": entry.weights is not None,
                "has_costs": entry.costs is not None}

    def create_session(self, hierarchy_id: str, policy: str = "greedy_tree",
                       mode: str = "offline", object_ref: str = "") -> dict:
        with self._lock:
            self.sweep_abandoned()
            entry = self.hierarchies.get(hierarchy_id)
            if entry is None:
                raise UnknownHierarchy(f"unknown hierarchy {hierarchy_id!r}")
            if policy not in POLICY_KINDS:
                raise BadParameter(f"unknown policy {policy!r}")
            if mode not in SESSION_MODES:
                raise BadParameter(f"unknown mode {mode!r}")
            session_id = uuid.uuid4().hex[:12]
            now = self.clock()
            sess = _Session(session_id, entry, policy, mode, object_ref, now)
            self._hydrate(sess)
            self.sessions[session_id] = sess
            event = {"e": "session", "id": session_id, "h": hierarchy_id,
                     "policy": policy, "mode": mode, "object": object_ref,
                     "ts": now}
            if sess.frozen_weights is not None:
                event["weights"] = sess.frozen_weights.tolist()
            self._append(event)
            self._maybe_snapshot()
            resp = self._session_view(sess)
            sess.last_response = resp
            return resp

    def get_session(self, session_id: str) -> dict:
        with self._lock:
            sess = self._get(session_id)
            return self._session_view(sess, transcript=True)

    def post_answer(self, session_id: str, ordinal: int, answer: bool) -> dict:
        with self._lock:
            self.sweep_abandoned()
            sess = self._get(session_id)
            answered = len(sess.answers)
            if ordinal == answered and answered > 0:
                if bool(answer) == sess.answers[-1] and sess.last_response:
                    return sess.last_response
                raise OrdinalMismatch(
                    f"ordinal {ordinal} was already answered differently")
            if sess.status != "open":
                raise SessionClosed(f"session {session_id} is {sess.status}")
            if ordinal != sess.pending_ordinal:
                raise OrdinalMismatch(
                    f"expected ordinal {sess.pending_ordinal}, got {ordinal}")
            now = self.clock()
            self._append({"e": "answer", "id": session_id, "ordinal": ordinal,
                          "node": sess.entry.h.labels[sess.pending.node],
                          "answer": bool(answer), "ts": now})
            self._advance(sess, None, bool(answer))
            sess.updated_at = now
            self._maybe_snapshot()
            resp = self._session_view(sess)
            sess.last_response = resp
            return resp

    def _get(self, session_id: str) -> _Session:
        sess = self.sessions.get(session_id)
        if sess is None:
            raise UnknownSession(f"unknown session {session_id!r}")
        return sess

    def _session_view(self, sess: _Session, transcript: bool = False) -> dict:
        h = sess.entry.h
        view = {
            "session_id": sess.session_id,
            "hierarchy_id": sess.entry.hierarchy_id,
            "policy": sess.policy_kind,
            "mode": sess.mode,
            "object_ref": sess.object_ref,
            "status": sess.status,
            "questions_asked": len(sess.answers),
            "live_count": (1 if sess.status == "resolved"
                           else sess.state.view.live_count
                           if sess.state is not None else None),
            "question": None,
            "result": None if sess.result is None else h.labels[sess.result],
        }
        if sess.pending is not None:
            view["question"] = {"node": h.labels[sess.pending.node],
                                "ordinal": sess.pending.ordinal,
                                "live_count": sess.state.view.live_count}
        if transcript:
            view["transcript"] = [
                {"node": h.labels[n], "answer": a}
                for n, a in zip(sess.asked_nodes, sess.answers)
            ]
        return view

    def hierarchy_stats(self, hierarchy_id: str, top_k: int = 10) -> dict:
        with self._lock:
            entry = self.hierarchies.get(hierarchy_id)
            if entry is None:
                raise UnknownHierarchy(f"unknown hierarchy {hierarchy_id!r}")
            dist = entry.learner.current()
            order = np.argsort(-dist, kind="stable")[:top_k]
            open_count = sum(1 for s in self.sessions.values()
                             if s.entry is entry and s.status == "open")
            recent = list(entry.recent_questions)[-self.rolling_window:]
            return {
                "hierarchy_id": hierarchy_id,
                "n": entry.h.n,
                "labeled_total": entry.learner.total,
                "distribution": {entry.h.labels[i]: float(dist[i])
                                 for i in range(entry.h.n)},
                "top": [[entry.h.labels[int(i)], float(dist[int(i)])]
                        for i in order],
                "rolling_mean_questions": (float(np.mean(recent))
                                           if recent else None),
                "sessions": {
                    "open": open_count,
                    "resolved": entry.resolved,
                    "abandoned": entry.abandoned,
                },
            }

    def sweep_abandoned(self) -> int:
        """Close sessions idle past the TTL; returns how many were closed."""
        now = self.clock()
        cutoff = now - self.ttl_seconds
        swept = 0
        for sess in list(self.sessions.values()):
            if sess.status == "open" and sess.updated_at < cutoff:
                self._append({"e": "abandon", "id": sess.session_id, "ts": now})
                self._mark_abandoned(sess)
                swept += 1
        if swept:
            self._maybe_snapshot()
        return swept

    def close(self) -> None:
        with self._lock:
            if self._log is not None:
                self._write_snapshot()
                self._log.close()
                self._log = None

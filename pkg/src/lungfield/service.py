"""Session-oriented HTTP facade for the interactive annotation loop.

Endpoints (JSON unless noted):

* ``POST /api/sessions`` - multipart upload (``file``) or ``{"path": ...}``
* ``GET  /api/sessions/{id}/slice?plane=&index=&wc=&ww=&overlay=`` - PNG
* ``POST /api/sessions/{id}/segment`` - ``{"mode": "auto"|"seeded", ...}``
* ``POST /api/sessions/{id}/strokes`` - one stroke (add/delete/seed-*)
* ``POST /api/sessions/{id}/undo``
* ``GET  /api/sessions/{id}/mask`` - gzipped NIfTI stream
* ``GET  /api/sessions/{id}/metrics`` - volumes per label in mL

Sessions are in-memory, evicted after an idle TTL. Mutating endpoints hold a
per-session lock; reads are lock-free on immutable snapshots.
"""

from __future__ import annotations

import gzip
import json
import os
import tempfile
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, Request, Response, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .affinity import AffinityParams
from .errors import LungFieldError, MissingSideError, NoMaskError, UnknownSessionError
from .grid import BinaryMask, HUVolume
from .metrics import volume_ml
from .nifti_io import load_volume, mask_to_bytes
from .render import encode_png, render_slice, slice_counts
from .seeding import SeedSet, validate_manual_seeds
from .segment import DEFAULT_THETA, auto_segment, segment_lungs
from .strokes import EditStack, Stroke, apply_stroke, seeds_from_stroke

DEFAULT_IDLE_TTL_S = 30 * 60
DEFAULT_SEGMENT_TIMEOUT_S = 120.0


@dataclass
class Session:
    session_id: str
    volume: HUVolume
    mask: BinaryMask
    left_mask: BinaryMask | None = None
    right_mask: BinaryMask | None = None
    seeds: SeedSet | None = None
    pending_seeds: dict = field(default_factory=lambda: {"left": [], "right": []})
    edits: EditStack = field(default_factory=EditStack)
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = field(default_factory=time.monotonic)
    has_mask: bool = False

    def touch(self):
        self.last_used = time.monotonic()

    def volumes(self) -> dict[str, float]:
        combined = self.mask
        out = {"left": 0.0, "right": 0.0, "combined": volume_ml(combined)}
        # left/right report the side-labeled portion still present in the
        # edited combined mask; stroke edits themselves are side-agnostic
        for name, side_mask in (("left", self.left_mask), ("right", self.right_mask)):
            if side_mask is not None:
                kept = side_mask.as_bool() & combined.as_bool()
                out[name] = float(kept.sum()) * combined.geometry.voxel_volume_mm3 / 1000.0
        return out


class SessionStore:
    def __init__(self, idle_ttl_s: float = DEFAULT_IDLE_TTL_S):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.idle_ttl_s = idle_ttl_s

    def create(self, volume: HUVolume) -> Session:
        session = Session(
            session_id=uuid.uuid4().hex,
            volume=volume,
            mask=BinaryMask.zeros(volume.geometry, label="combined"),
        )
        with self._lock:
            self._evict_idle()
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._evict_idle()
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"unknown session {session_id}")
        session.touch()
        return session

    def _evict_idle(self):
        if self.idle_ttl_s <= 0:
            return
        deadline = time.monotonic() - self.idle_ttl_s
        for key in [k for k, s in self._sessions.items() if s.last_used < deadline]:
            del self._sessions[key]


def _error_payload(err: LungFieldError) -> dict:
    payload = {"code": err.code, "message": err.message}
    side = getattr(err, "side", "")
    if side:
        payload["side"] = side
    if isinstance(err, MissingSideError):
        payload["hint"] = f"paint a seed-{side} stroke and rerun in seeded mode"
    return {"error": payload}


def _parse_params(raw: dict | None) -> tuple[AffinityParams, float]:
    raw = raw or {}
    try:
        params = AffinityParams(
            mean_hu=float(raw.get("mean", -550.0)),
            sigma_hu=float(raw.get("sigma", 150.0)),
            adjacency=int(raw.get("adjacency", 6)),
        )
        theta = float(raw.get("theta", DEFAULT_THETA))
    except (TypeError, ValueError) as exc:
        raise LungFieldError(f"bad segmentation parameters: {exc}") from exc
    return params, theta


def _parse_seeds(session: Session, raw: dict | None) -> SeedSet:
    if raw:
        left = [tuple(int(v) for v in c) for c in raw.get("left", [])]
        right = [tuple(int(v) for v in c) for c in raw.get("right", [])]
        provenance = "manual-click"
    else:
        left = list(session.pending_seeds["left"])
        right = list(session.pending_seeds["right"])
        provenance = "manual-stroke"
    for side, coords in (("left", left), ("right", right)):
        if not coords:
            raise MissingSideError(side, f"seeded mode needs {side} seeds")
    seeds = SeedSet(left=tuple(left), right=tuple(right), provenance=provenance)
    seeds, _warnings = validate_manual_seeds(session.volume, seeds)
    return seeds


def _default_ui_dir() -> Path | None:
    env_dir = os.environ.get("LUNGFIELD_UI_DIR")
    if env_dir:
        return Path(env_dir)
    repo_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return repo_dist if repo_dist.is_dir() else None


def create_app(
    idle_ttl_s: float = DEFAULT_IDLE_TTL_S,
    segment_timeout_s: float = DEFAULT_SEGMENT_TIMEOUT_S,
    cors_origins: tuple[str, ...] = ("*",),
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="lungfield annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(idle_ttl_s=idle_ttl_s)
    app.state.store = store
    executor = ThreadPoolExecutor(max_workers=2)

    @app.exception_handler(LungFieldError)
    async def domain_error(_request: Request, err: LungFieldError):
        status = 404 if isinstance(err, UnknownSessionError) else 422
        return JSONResponse(status_code=status, content=_error_payload(err))

    @app.post("/api/sessions")
    async def create_session(request: Request, file: UploadFile | None = None):
        if file is not None:
            suffix = "".join(Path(file.filename or "upload.nii").suffixes) or ".nii"
            with tempfile.NamedTemporaryFile(suffix=suffix, delete=False) as handle:
                handle.write(await file.read())
                temp_path = Path(handle.name)
            try:
                volume = load_volume(temp_path)
            finally:
                temp_path.unlink(missing_ok=True)
        else:
            raw = await request.body()
            try:
                body = json.loads(raw) if raw else {}
            except json.JSONDecodeError as exc:
                raise LungFieldError(f"invalid JSON body: {exc}") from exc
            if not isinstance(body, dict) or "path" not in body:
                raise LungFieldError("provide a multipart 'file' or a JSON {'path': ...}")
            volume = load_volume(body["path"])
        session = store.create(volume)
        hu_min, hu_max = volume.hu_range()
        return {
            "session_id": session.session_id,
            "dims": list(volume.dims),
            "spacing": list(volume.geometry.spacing),
            "hu_min": hu_min,
            "hu_max": hu_max,
            "slices": slice_counts(volume),
        }

    @app.get("/api/sessions/{session_id}/slice")
    def get_slice(
        session_id: str,
        plane: str = "axial",
        index: int = 0,
        wc: float = -500.0,
        ww: float = 1400.0,
        overlay: bool = False,
    ):
        session = store.get(session_id)
        image = render_slice(session.volume, session.mask, plane, index, wc, ww, overlay)
        return Response(content=encode_png(image), media_type="image/png")

    @app.post("/api/sessions/{session_id}/segment")
    def segment(session_id: str, body: dict = Body(default_factory=dict)):
        session = store.get(session_id)
        mode = body.get("mode", "auto")
        if mode not in ("auto", "seeded"):
            raise LungFieldError(f"mode must be 'auto' or 'seeded', got {mode!r}")
        params, theta = _parse_params(body.get("params"))

        with session.lock:
            if mode == "auto":
                job = lambda: auto_segment(session.volume, params, theta)
            else:
                seeds = _parse_seeds(session, body.get("seeds"))
                job = lambda: segment_lungs(session.volume, seeds, params, theta)
            started = time.perf_counter()
            future = executor.submit(job)
            try:
                result = future.result(timeout=segment_timeout_s)
            except FutureTimeout as exc:
                raise LungFieldError(
                    f"segmentation exceeded the {segment_timeout_s:.0f}s server timeout"
                ) from exc
            elapsed_ms = (time.perf_counter() - started) * 1000.0

            session.mask = result.combined_mask
            session.left_mask = result.left_mask
            session.right_mask = result.right_mask
            session.seeds = result.seeds
            session.edits.clear()
            session.has_mask = True

        return {
            "volumes_ml": session.volumes(),
            "seeds": [
                {"side": side, "voxel": list(coord), "hu": float(session.volume.values[coord])}
                for side in ("left", "right")
                for coord in result.seeds.side(side)
            ],
            "elapsed_ms": elapsed_ms,
            "theta": theta,
            "params": {
                "mean": params.mean_hu,
                "sigma": params.sigma_hu,
                "adjacency": params.adjacency,
            },
        }

    @app.post("/api/sessions/{session_id}/strokes")
    def submit_stroke(session_id: str, body: dict = Body(...)):
        session = store.get(session_id)
        try:
            stroke = Stroke(
                plane=body["plane"],
                slice_index=int(body["slice_index"]),
                points=tuple((float(u), float(v)) for u, v in body["points"]),
                radius_px=int(body.get("radius_px", 0)),
                mode=body["mode"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise LungFieldError(f"malformed stroke: {exc}") from exc

        with session.lock:
            if stroke.mode in ("seed-left", "seed-right"):
                side, voxels = seeds_from_stroke(stroke, session.volume.geometry)
                pending = session.pending_seeds[side]
                known = set(pending)
                pending.extend(v for v in voxels if v not in known)
                return {
                    "changed": 0,
                    "volume_ml": volume_ml(session.mask),
                    "seeds": {
                        "left": len(session.pending_seeds["left"]),
                        "right": len(session.pending_seeds["right"]),
                    },
                }
            new_mask, record = apply_stroke(session.mask, stroke)
            session.mask = new_mask
            session.edits.push(record)
            return {"changed": len(record.changed_voxels), "volume_ml": volume_ml(session.mask)}

    @app.post("/api/sessions/{session_id}/undo")
    def undo_latest(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if not len(session.edits):
                return {"changed": 0, "volume_ml": volume_ml(session.mask)}
            session.mask, record = session.edits.undo_latest(session.mask)
            return {"changed": len(record.changed_voxels), "volume_ml": volume_ml(session.mask)}

    @app.get("/api/sessions/{session_id}/mask")
    def export_mask(session_id: str):
        session = store.get(session_id)
        if not session.has_mask and session.mask.count() == 0:
            raise NoMaskError("no annotation yet: run segmentation or paint strokes first")
        payload = gzip.compress(mask_to_bytes(session.mask), mtime=0)
        return Response(
            content=payload,
            media_type="application/gzip",
            headers={"Content-Disposition": "attachment; filename=mask.nii.gz"},
        )

    @app.get("/api/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        session = store.get(session_id)
        return session.volumes()

    static_dir = Path(ui_dir) if ui_dir else _default_ui_dir()
    if static_dir and static_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


app = create_app()

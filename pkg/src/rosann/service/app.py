"""HTTP surface binding bags, media, annotation, stats, and chat.

Every domain error crosses the wire as one envelope,
{"error": {"code", "message", "field"}}, with the HTTP status derived
from the error's machine code.  Media endpoints honor byte-range
requests so browser video elements can seek.  Mutations persist before
the response is sent.
"""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from rosann.annotation.core import (
    Project,
    add_annotation,
    create_tier,
    delete_annotation,
    update_annotation,
)
from rosann.annotation.storage import (
    codebook_from_json,
    codebook_to_json,
    export_csv,
    list_codebooks,
    load_codebook,
    project_to_json,
    save_codebook,
)
from rosann.bag import open_bag
from rosann.errors import RosannError
from rosann.llm.client import ChatClient
from rosann.llm.context import PrivacyPolicy, build_context
from rosann.llm.suggestions import (
    NoJsonFound,
    apply_suggestions,
    parse_suggestions,
)
from rosann.media.pipeline import (
    AUDIO_WAV_NAME,
    ExtractionConfig,
    MANIFEST_NAME,
    bag_content_id,
    load_manifest,
    process_bag,
)
from rosann.media.transcribe import HttpTranscriber, Transcriber
from rosann.paths import DataDirs
from rosann.service.jobs import JobRegistry
from rosann.service.store import ProjectStore, UnknownBag

log = logging.getLogger(__name__)

ENV_TRANSCRIBE_URL = "ROSANN_TRANSCRIBE_URL"

# Machine code -> HTTP status.  Codes not listed are client errors.
STATUS_BY_CODE = {
    "NOT_FOUND": 404,
    "OVERLAP": 409,
    "DUPLICATE": 409,
    "AUTH": 401,
    "TRANSPORT": 502,
    "TRANSCRIBER": 502,
    "NO_JSON": 502,
}
DEFAULT_ERROR_STATUS = 422

MEDIA_FILES = {"video": None, "audio": None}  # names resolved per manifest


class ProcessRequest(BaseModel):
    transcribe: bool = False
    audio_format_hint: str = "mp3"
    video_topic: str = "/image_raw"
    audio_topic: str = "/audio"
    sample_rate: int = 16_000
    channels: int = 1


class TierCreate(BaseModel):
    name: str
    kind: str
    codebook_ref: str | None = None


class AnnotationCreate(BaseModel):
    tier: str
    start_ms: int
    end_ms: int
    value: str


class AnnotationUpdate(BaseModel):
    start_ms: int | None = None
    end_ms: int | None = None
    value: str | None = None
    tier: str | None = None


class ChatRequest(BaseModel):
    instruction: str
    privacy_mode: str = "deny_all_frames"
    frames_per_minute: float = 6.0
    model: str | None = None


def _error_response(code: str, message: str, field: str | None = None,
                    status: int | None = None) -> JSONResponse:
    if status is None:
        status = STATUS_BY_CODE.get(code, DEFAULT_ERROR_STATUS)
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message, "field": field}},
    )


def _range_response(path: Path, media_type: str, request: Request) -> Response:
    size = path.stat().st_size
    range_header = request.headers.get("range")
    common = {"Accept-Ranges": "bytes"}
    if not range_header:
        return Response(path.read_bytes(), media_type=media_type,
                        headers={**common, "Content-Length": str(size)})
    unit, _, spec = range_header.partition("=")
    first = spec.split(",")[0].strip()
    start_s, _, end_s = first.partition("-")
    try:
        if unit.strip().lower() != "bytes" or (not start_s and not end_s):
            raise ValueError(range_header)
        if not start_s:  # suffix form: last N bytes
            length = int(end_s)
            start = max(size - length, 0)
            end = size - 1
        else:
            start = int(start_s)
            end = int(end_s) if end_s else size - 1
    except ValueError:
        return Response(status_code=416, headers={"Content-Range": f"bytes */{size}"})
    if start >= size or end < start:
        return Response(status_code=416, headers={"Content-Range": f"bytes */{size}"})
    end = min(end, size - 1)
    with open(path, "rb") as fh:
        fh.seek(start)
        body = fh.read(end - start + 1)
    return Response(
        body,
        status_code=206,
        media_type=media_type,
        headers={
            **common,
            "Content-Range": f"bytes {start}-{end}/{size}",
            "Content-Length": str(len(body)),
        },
    )


def default_transcriber_factory() -> Transcriber | None:
    url = os.environ.get(ENV_TRANSCRIBE_URL)
    if not url:
        return None
    return HttpTranscriber(url)


def create_app(
    dirs: DataDirs | None = None,
    transcriber_factory=default_transcriber_factory,
    chat_client_factory=ChatClient,
    static_dir: Path | None = None,
) -> FastAPI:
    if dirs is None:
        dirs = DataDirs.from_env()
    dirs.ensure()
    store = ProjectStore(dirs)
    jobs = JobRegistry()
    process_jobs: dict[tuple[str, str], str] = {}  # (bag_id, fingerprint) -> job id
    app = FastAPI(title="annotation workbench", openapi_url="/api/openapi.json")
    app.state.dirs = dirs
    app.state.store = store
    app.state.jobs = jobs

    @app.exception_handler(RosannError)
    async def domain_error(request: Request, exc: RosannError):
        return _error_response(exc.code, str(exc), getattr(exc, "field", None))

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", ()))
        return _error_response("VALIDATION", first.get("msg", "invalid request"),
                               field or None, status=422)

    def _resolve_bag_file(ident: str) -> tuple[Path, str]:
        """Accept a bag_id or a file name from rosbag-data."""
        candidates = sorted(dirs.bags.glob("*.bag"))
        for path in candidates:
            if path.name == ident or path.stem == ident:
                return path, bag_content_id(path)
        for path in candidates:
            if bag_content_id(path) == ident:
                return path, ident
        raise UnknownBag(f"no bag matching {ident!r}")

    @app.get("/api/bags")
    def bag_list():
        out = []
        for path in sorted(dirs.bags.glob("*.bag")):
            bag_id = bag_content_id(path)
            processed = (dirs.processed_for(bag_id) / MANIFEST_NAME).exists()
            out.append({
                "name": path.name,
                "bag_id": bag_id,
                "size": path.stat().st_size,
                "processed": processed,
            })
        return out

    @app.post("/api/bags/{ident}/process")
    def bag_process(ident: str, body: ProcessRequest | None = None):
        body = body or ProcessRequest()
        path, bag_id = _resolve_bag_file(ident)
        config = ExtractionConfig(
            video_topic=body.video_topic,
            audio_topic=body.audio_topic,
            audio_format_hint=body.audio_format_hint,
            sample_rate=body.sample_rate,
            channels=body.channels,
            transcribe=body.transcribe,
        )
        fp = config.fingerprint()
        manifest_path = dirs.processed_for(bag_id) / MANIFEST_NAME
        if manifest_path.exists():
            manifest = load_manifest(dirs, bag_id)
            if manifest.config_fingerprint == fp:
                return {"cached": True, "bag_id": bag_id,
                        "manifest": manifest.to_json()}
        job_key = (bag_id, fp)
        active = process_jobs.get(job_key)
        if active is not None:
            job = jobs.get(active)
            if job.state in ("queued", "running"):
                return {"cached": False, "bag_id": bag_id, "job": job.to_json()}

        def work() -> dict:
            handle = open_bag(path)
            transcriber = transcriber_factory() if body.transcribe else None
            result = process_bag(handle, config, dirs, transcriber=transcriber)
            return {"bag_id": bag_id, "manifest": result.manifest.to_json(),
                    "cache_hit": result.cache_hit}

        job = jobs.submit("process_bag", work)
        process_jobs[job_key] = job.id
        return {"cached": False, "bag_id": bag_id, "job": job.to_json()}

    @app.get("/api/bags/{ident}/manifest")
    def bag_manifest(ident: str):
        _, bag_id = _resolve_bag_file(ident)
        manifest_path = dirs.processed_for(bag_id) / MANIFEST_NAME
        if not manifest_path.exists():
            raise UnknownBag(f"bag {bag_id!r} is not processed")
        return load_manifest(dirs, bag_id).to_json()

    @app.get("/api/bags/{ident}/frame-index")
    def bag_frame_index(ident: str):
        _, bag_id = _resolve_bag_file(ident)
        manifest_path = dirs.processed_for(bag_id) / MANIFEST_NAME
        if not manifest_path.exists():
            raise UnknownBag(f"bag {bag_id!r} is not processed")
        manifest = load_manifest(dirs, bag_id)
        if manifest.video is None:
            raise UnknownBag(f"bag {bag_id!r} has no video")
        path = dirs.processed_for(bag_id) / manifest.video.frame_index_path
        return json.loads(path.read_text())

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        return jobs.get(job_id).to_json()

    @app.get("/media/{bag_id}/{kind}")
    def media(bag_id: str, kind: str, request: Request):
        if kind not in ("video", "audio"):
            raise UnknownBag(f"no media kind {kind!r}")
        manifest_path = dirs.processed_for(bag_id) / MANIFEST_NAME
        if not manifest_path.exists():
            raise UnknownBag(f"bag {bag_id!r} is not processed")
        manifest = load_manifest(dirs, bag_id)
        section = manifest.video if kind == "video" else manifest.audio
        if section is None:
            raise UnknownBag(f"bag {bag_id!r} has no {kind}")
        path = dirs.processed_for(bag_id) / section.path
        media_type = "video/x-msvideo" if kind == "video" else (
            "audio/wav" if path.name == AUDIO_WAV_NAME
            else "application/octet-stream")
        return _range_response(path, media_type, request)

    @app.get("/api/codebooks")
    def codebooks_list():
        return [codebook_to_json(b) for b in list_codebooks(dirs).values()]

    @app.post("/api/codebooks")
    def codebook_upsert(body: dict):
        book = codebook_from_json(body)
        save_codebook(book, dirs)
        return codebook_to_json(book)

    @app.get("/api/codebooks/{name}")
    def codebook_get(name: str):
        path = dirs.booklist / f"{name}.json"
        if not path.exists():
            raise UnknownBag(f"no codebook {name!r}")
        return codebook_to_json(load_codebook(path))

    @app.put("/api/codebooks/{name}")
    def codebook_put(name: str, body: dict):
        body = dict(body)
        body["name"] = name
        book = codebook_from_json(body)
        save_codebook(book, dirs)
        return codebook_to_json(book)

    @app.post("/api/projects/{bag_id}")
    def project_create(bag_id: str):
        project, created = store.open_or_create(bag_id)
        return {"created": created, "project": project_to_json(project)}

    @app.get("/api/projects/{bag_id}")
    def project_get(bag_id: str):
        return project_to_json(store.get(bag_id))

    @app.post("/api/projects/{bag_id}/tiers")
    def tier_create(bag_id: str, body: TierCreate):
        books = list_codebooks(dirs)

        def op(project: Project):
            tier = create_tier(project, body.name, body.kind,
                               body.codebook_ref, codebooks=books)
            return {"name": tier.name, "kind": tier.kind,
                    "codebook_ref": tier.codebook_ref, "origin": tier.origin}
        return store.mutate(bag_id, op)

    @app.post("/api/projects/{bag_id}/annotations")
    def annotation_create(bag_id: str, body: AnnotationCreate):
        books = list_codebooks(dirs)

        def op(project: Project):
            ann = add_annotation(project, body.tier, body.start_ms,
                                 body.end_ms, body.value, codebooks=books)
            return {"id": ann.id, "tier": body.tier, "start_ms": ann.start_ms,
                    "end_ms": ann.end_ms, "value": ann.value}
        return store.mutate(bag_id, op)

    @app.put("/api/projects/{bag_id}/annotations/{ann_id}")
    def annotation_update(bag_id: str, ann_id: str, body: AnnotationUpdate):
        books = list_codebooks(dirs)

        def op(project: Project):
            ann = update_annotation(
                project, ann_id,
                start_ms=body.start_ms, end_ms=body.end_ms,
                value=body.value, tier_name=body.tier, codebooks=books)
            tier, _ = project.find_annotation(ann.id)
            return {"id": ann.id, "tier": tier.name, "start_ms": ann.start_ms,
                    "end_ms": ann.end_ms, "value": ann.value}
        return store.mutate(bag_id, op)

    @app.delete("/api/projects/{bag_id}/annotations/{ann_id}")
    def annotation_delete(bag_id: str, ann_id: str):
        def op(project: Project):
            delete_annotation(project, ann_id)
            return {"deleted": ann_id}
        return store.mutate(bag_id, op)

    @app.get("/api/projects/{bag_id}/stats")
    def project_stats(bag_id: str, include_transcript: bool = True):
        from rosann.stats import compute_all, stats_to_json
        project = store.get(bag_id)
        overall, tiers = compute_all(project,
                                     include_transcript=include_transcript)
        return stats_to_json(overall, tiers)

    @app.get("/api/projects/{bag_id}/export/csv")
    def project_export_csv(bag_id: str):
        doc = export_csv(store.get(bag_id))
        return Response(doc, media_type="text/csv", headers={
            "Content-Disposition":
                f'attachment; filename="{bag_id}-annotations.csv"',
        })

    @app.get("/api/projects/{bag_id}/export/stats")
    def project_export_stats(bag_id: str, format: str = "csv",
                             include_transcript: bool = True):
        from rosann.stats import compute_all, export_stats
        project = store.get(bag_id)
        overall, tiers = compute_all(project,
                                     include_transcript=include_transcript)
        json_doc, csv_doc = export_stats(overall, tiers)
        if format == "json":
            return Response(json_doc, media_type="application/json")
        return Response(csv_doc, media_type="text/csv", headers={
            "Content-Disposition": f'attachment; filename="{bag_id}-stats.csv"',
        })

    @app.post("/api/projects/{bag_id}/chat")
    def project_chat(bag_id: str, body: ChatRequest):
        project = store.get(bag_id)
        manifest = load_manifest(dirs, bag_id)
        books = list_codebooks(dirs)
        policy = PrivacyPolicy(mode=body.privacy_mode)
        context = build_context(
            project, manifest, dirs, body.instruction,
            policy=policy, frames_per_minute=body.frames_per_minute,
            codebooks=books,
        )
        client = chat_client_factory() if body.model is None else (
            chat_client_factory(model=body.model))
        text = client.request_annotations(context)
        try:
            suggestions, rejected = parse_suggestions(
                text, project.observation_ms)
        except NoJsonFound:
            return {
                "assistant_text": text,
                "created_tiers": [],
                "applied": 0,
                "rejected": [],
                "note": "response contained no suggestion array",
            }

        def op(proj: Project):
            return apply_suggestions(proj, suggestions)

        report = store.mutate(bag_id, op)
        return {
            "assistant_text": text,
            "created_tiers": report.created_tiers,
            "applied": report.applied,
            "rejected": (
                [{"item": r.item, "reason": r.reason} for r in rejected]
                + [{"item": r.item, "reason": r.reason} for r in report.rejected]
            ),
        }

    if static_dir is not None and static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="frontend")
    return app

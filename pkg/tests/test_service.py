"""HTTP contract tests for the FastAPI service.

Everything runs against in-process apps built on temp directories, with
the transcriber and chat client swapped for scripted stand-ins.  The
error envelope, status mapping, byte-range handling, and persist-before-
return behavior are the contract under test, not FastAPI itself.
"""

import json
import threading

import pytest
from fastapi.testclient import TestClient

from conftest import DEMO_CODES, demo_codebook, make_media_bag
from rosann.annotation.storage import codebook_to_json, export_csv
from rosann.media.pipeline import MANIFEST_NAME, bag_content_id, load_manifest
from rosann.media.transcribe import StubTranscriber, TranscriptSegment
from rosann.paths import DataDirs
from rosann.service.app import create_app
from rosann.stats import compute_all, stats_to_json

BAG_NAME = "session1.bag"
PCM_BODY = {"audio_format_hint": "pcm16"}


class ScriptedChat:
    """Chat client double: returns a fixed reply, records each context."""

    def __init__(self, text: str, model: str | None = None):
        self.text = text
        self.model = model
        self.contexts = []

    def request_annotations(self, context) -> str:
        self.contexts.append(context)
        return self.text


class Env:
    def __init__(self, tmp_path, chat_text="no suggestions here"):
        self.dirs = DataDirs(tmp_path / "datas").ensure()
        self.bag_path = self.dirs.bags / BAG_NAME
        # 61 frames at 100 ms -> 6 s window, long enough for the stub script.
        make_media_bag(self.bag_path, frames=61)
        self.bag_id = bag_content_id(self.bag_path)
        self.chat_clients: list[ScriptedChat] = []
        self.chat_text = chat_text

        def chat_factory(model=None):
            client = ScriptedChat(self.chat_text, model=model)
            self.chat_clients.append(client)
            return client

        self.app = create_app(
            self.dirs,
            transcriber_factory=lambda: StubTranscriber(),
            chat_client_factory=chat_factory,
        )
        self.client = TestClient(self.app)

    def process(self, ident=None, **extra) -> dict:
        """POST process and wait the job out; returns the manifest json."""
        body = {**PCM_BODY, **extra}
        resp = self.client.post(f"/api/bags/{ident or BAG_NAME}/process", json=body)
        assert resp.status_code == 200, resp.text
        payload = resp.json()
        if payload.get("cached"):
            return payload["manifest"]
        job = self.app.state.jobs.wait(payload["job"]["id"], timeout=30)
        assert job.state == "done", job.error
        return job.result["manifest"]

    def create_project(self) -> dict:
        resp = self.client.post(f"/api/projects/{self.bag_id}")
        assert resp.status_code == 200, resp.text
        return resp.json()


@pytest.fixture
def env(tmp_path):
    return Env(tmp_path)


def assert_envelope(resp, status: int, code: str):
    assert resp.status_code == status, resp.text
    body = resp.json()
    assert set(body) == {"error"}
    assert set(body["error"]) == {"code", "message", "field"}
    assert body["error"]["code"] == code
    return body["error"]


# -- bag listing and processing ------------------------------------------

def test_bag_list_empty(tmp_path):
    dirs = DataDirs(tmp_path / "d").ensure()
    client = TestClient(create_app(dirs))
    assert client.get("/api/bags").json() == []


def test_bag_list_tracks_processing(env):
    before = env.client.get("/api/bags").json()
    assert len(before) == 1
    assert before[0]["name"] == BAG_NAME
    assert before[0]["bag_id"] == env.bag_id
    assert before[0]["size"] == env.bag_path.stat().st_size
    assert before[0]["processed"] is False

    env.process()
    after = env.client.get("/api/bags").json()
    assert after[0]["processed"] is True


def test_process_job_lifecycle_then_cache(env):
    resp = env.client.post(f"/api/bags/{BAG_NAME}/process", json=PCM_BODY)
    payload = resp.json()
    assert payload["cached"] is False
    assert payload["bag_id"] == env.bag_id
    job_id = payload["job"]["id"]
    job = env.app.state.jobs.wait(job_id, timeout=30)
    assert job.state == "done"

    status = env.client.get(f"/api/jobs/{job_id}").json()
    assert status["state"] == "done"
    assert status["progress"] == 1.0
    assert status["error"] is None
    assert status["result"]["cache_hit"] is False
    manifest = status["result"]["manifest"]
    assert manifest["bag_id"] == env.bag_id

    # Same config again: answered inline from the manifest, no new job.
    again = env.client.post(f"/api/bags/{BAG_NAME}/process", json=PCM_BODY).json()
    assert again["cached"] is True
    assert again["manifest"] == manifest


def test_process_resolves_name_stem_and_content_id(env):
    manifest = env.process(ident=BAG_NAME)
    assert env.process(ident="session1") == manifest
    assert env.process(ident=env.bag_id) == manifest


def test_process_config_change_spawns_new_job(env):
    env.process()
    resp = env.client.post(
        f"/api/bags/{BAG_NAME}/process",
        json={**PCM_BODY, "sample_rate": 8_000},
    ).json()
    assert resp["cached"] is False
    assert "job" in resp


def test_process_unknown_bag(env):
    resp = env.client.post("/api/bags/missing/process", json=PCM_BODY)
    err = assert_envelope(resp, 404, "NOT_FOUND")
    assert "missing" in err["message"]


def test_process_validation_error(env):
    resp = env.client.post(
        f"/api/bags/{BAG_NAME}/process", json={"sample_rate": "loud"}
    )
    err = assert_envelope(resp, 422, "VALIDATION")
    assert "sample_rate" in err["field"]


def test_process_failure_reported_on_job(env):
    bad = env.dirs.bags / "broken.bag"
    bad.write_bytes(b"this is not a bag at all, sorry" * 4)
    resp = env.client.post("/api/bags/broken/process", json=PCM_BODY).json()
    job = env.app.state.jobs.wait(resp["job"]["id"], timeout=30)
    assert job.state == "failed"
    assert "MalformedMagic" in job.error
    status = env.client.get(f"/api/jobs/{resp['job']['id']}").json()
    assert status["state"] == "failed"
    assert status["result"] is None


def test_concurrent_process_returns_live_job(tmp_path):
    """A second identical request joins the running job, never forks it."""
    dirs = DataDirs(tmp_path / "d").ensure()
    make_media_bag(dirs.bags / BAG_NAME, frames=61)
    started = threading.Event()
    release = threading.Event()

    class BlockingTranscriber:
        def transcribe(self, wav_path):
            started.set()
            assert release.wait(timeout=30)
            return [TranscriptSegment("alice", 100, 600, "hi")]

    app = create_app(dirs, transcriber_factory=lambda: BlockingTranscriber())
    client = TestClient(app)
    body = {**PCM_BODY, "transcribe": True}
    first = client.post(f"/api/bags/{BAG_NAME}/process", json=body).json()
    assert started.wait(timeout=30)
    second = client.post(f"/api/bags/{BAG_NAME}/process", json=body).json()
    assert second["cached"] is False
    assert second["job"]["id"] == first["job"]["id"]
    release.set()
    job = app.state.jobs.wait(first["job"]["id"], timeout=30)
    assert job.state == "done"


def test_job_unknown(env):
    assert_envelope(env.client.get("/api/jobs/job-99"), 404, "NOT_FOUND")


def test_manifest_endpoint_matches_disk(env):
    env.process()
    via_name = env.client.get(f"/api/bags/{BAG_NAME}/manifest").json()
    via_id = env.client.get(f"/api/bags/{env.bag_id}/manifest").json()
    on_disk = load_manifest(env.dirs, env.bag_id).to_json()
    assert via_name == on_disk
    assert via_id == on_disk


def test_manifest_before_processing(env):
    resp = env.client.get(f"/api/bags/{BAG_NAME}/manifest")
    assert_envelope(resp, 404, "NOT_FOUND")


def test_frame_index_endpoint(env):
    manifest = env.process()
    doc = env.client.get(f"/api/bags/{BAG_NAME}/frame-index").json()
    assert set(doc) == {"micro_sec_per_frame", "bag_time_ms"}
    assert len(doc["bag_time_ms"]) == manifest["video"]["frame_count"]
    assert doc["bag_time_ms"] == sorted(doc["bag_time_ms"])
    # The served document is byte-for-byte the one the manifest points at.
    on_disk = json.loads(
        (env.dirs.processed_for(env.bag_id)
         / manifest["video"]["frame_index_path"]).read_text())
    assert doc == on_disk


def test_frame_index_before_processing(env):
    resp = env.client.get(f"/api/bags/{BAG_NAME}/frame-index")
    assert_envelope(resp, 404, "NOT_FOUND")


# -- projects -------------------------------------------------------------

def test_project_create_seeds_window_and_transcript(env):
    env.process(transcribe=True)
    created = env.create_project()
    assert created["created"] is True
    project = created["project"]
    assert project["bag_id"] == env.bag_id
    assert project["observation_ms"] == 6000
    by_name = {t["name"]: t for t in project["tiers"]}
    assert set(by_name) == {"Speaker 1", "Speaker 2"}
    assert by_name["Speaker 1"]["kind"] == "transcript"
    spans = [(a["start_ms"], a["end_ms"], a["value"])
             for a in by_name["Speaker 1"]["annotations"]]
    assert spans == [(500, 2500, "hello robot")]

    again = env.create_project()
    assert again["created"] is False
    assert again["project"] == project


def test_project_requires_processed_bag(env):
    resp = env.client.post(f"/api/projects/{env.bag_id}")
    err = assert_envelope(resp, 404, "NOT_FOUND")
    assert "process" in err["message"]


def test_project_get_before_create(env):
    env.process()
    assert_envelope(env.client.get(f"/api/projects/{env.bag_id}"), 404, "NOT_FOUND")


# -- codebooks ------------------------------------------------------------

def test_codebook_upsert_and_fetch(env):
    doc = codebook_to_json(demo_codebook())
    posted = env.client.post("/api/codebooks", json=doc)
    assert posted.status_code == 200
    assert [c["code"] for c in posted.json()["codes"]] == list(DEMO_CODES)

    listed = env.client.get("/api/codebooks").json()
    assert [b["name"] for b in listed] == ["social-cues"]

    fetched = env.client.get("/api/codebooks/social-cues").json()
    assert fetched == posted.json()

    renamed = env.client.put("/api/codebooks/house-style", json=doc).json()
    assert renamed["name"] == "house-style"
    assert env.client.get("/api/codebooks/house-style").status_code == 200


def test_codebook_unknown(env):
    assert_envelope(env.client.get("/api/codebooks/nope"), 404, "NOT_FOUND")


# -- tier and annotation CRUD ----------------------------------------------

def _seeded(env):
    """Processed bag, empty project, demo codebook installed."""
    env.process()
    env.create_project()
    env.client.post("/api/codebooks", json=codebook_to_json(demo_codebook()))
    return f"/api/projects/{env.bag_id}"


def test_annotation_crud_roundtrip(env):
    base = _seeded(env)
    tier = env.client.post(f"{base}/tiers", json={
        "name": "Gaze", "kind": "codebook", "codebook_ref": "social-cues",
    })
    assert tier.status_code == 200
    assert tier.json() == {"name": "Gaze", "kind": "codebook",
                           "codebook_ref": "social-cues", "origin": "manual"}

    made = env.client.post(f"{base}/annotations", json={
        "tier": "Gaze", "start_ms": 100, "end_ms": 400, "value": "smile",
    })
    assert made.status_code == 200
    ann = made.json()
    assert ann == {"id": "a1", "tier": "Gaze", "start_ms": 100,
                   "end_ms": 400, "value": "smile"}

    moved = env.client.put(f"{base}/annotations/a1", json={
        "start_ms": 450, "end_ms": 600,
    }).json()
    assert (moved["start_ms"], moved["end_ms"]) == (450, 600)
    assert moved["value"] == "smile"

    project = env.client.get(base).json()
    gaze = next(t for t in project["tiers"] if t["name"] == "Gaze")
    assert [(a["start_ms"], a["end_ms"]) for a in gaze["annotations"]] == [(450, 600)]

    deleted = env.client.delete(f"{base}/annotations/a1")
    assert deleted.json() == {"deleted": "a1"}
    project = env.client.get(base).json()
    gaze = next(t for t in project["tiers"] if t["name"] == "Gaze")
    assert gaze["annotations"] == []


def test_overlap_rejected_and_state_untouched(env):
    base = _seeded(env)
    env.client.post(f"{base}/tiers", json={"name": "Notes", "kind": "free_text"})
    ok = env.client.post(f"{base}/annotations", json={
        "tier": "Notes", "start_ms": 1000, "end_ms": 2000, "value": "first",
    })
    assert ok.status_code == 200
    clash = env.client.post(f"{base}/annotations", json={
        "tier": "Notes", "start_ms": 1500, "end_ms": 2500, "value": "second",
    })
    assert_envelope(clash, 409, "OVERLAP")
    tier = next(t for t in env.client.get(base).json()["tiers"]
                if t["name"] == "Notes")
    assert [a["value"] for a in tier["annotations"]] == ["first"]

    # Touching intervals are not overlap.
    touch = env.client.post(f"{base}/annotations", json={
        "tier": "Notes", "start_ms": 2000, "end_ms": 2500, "value": "second",
    })
    assert touch.status_code == 200


def test_update_overlap_409(env):
    base = _seeded(env)
    env.client.post(f"{base}/tiers", json={"name": "Notes", "kind": "free_text"})
    env.client.post(f"{base}/annotations", json={
        "tier": "Notes", "start_ms": 0, "end_ms": 500, "value": "x"})
    env.client.post(f"{base}/annotations", json={
        "tier": "Notes", "start_ms": 1000, "end_ms": 1500, "value": "y"})
    resp = env.client.put(f"{base}/annotations/a2", json={"start_ms": 400})
    assert_envelope(resp, 409, "OVERLAP")


def test_code_outside_codebook_422(env):
    base = _seeded(env)
    env.client.post(f"{base}/tiers", json={
        "name": "Gaze", "kind": "codebook", "codebook_ref": "social-cues"})
    resp = env.client.post(f"{base}/annotations", json={
        "tier": "Gaze", "start_ms": 0, "end_ms": 100, "value": "juggling",
    })
    assert_envelope(resp, 422, "CODE_NOT_IN_CODEBOOK")


def test_duplicate_tier_409(env):
    base = _seeded(env)
    body = {"name": "Notes", "kind": "free_text"}
    assert env.client.post(f"{base}/tiers", json=body).status_code == 200
    assert_envelope(env.client.post(f"{base}/tiers", json=body), 409, "DUPLICATE")


def test_unknown_tier_404(env):
    base = _seeded(env)
    resp = env.client.post(f"{base}/annotations", json={
        "tier": "Ghost", "start_ms": 0, "end_ms": 100, "value": "x",
    })
    assert_envelope(resp, 404, "NOT_FOUND")


def test_out_of_window_422(env):
    base = _seeded(env)
    env.client.post(f"{base}/tiers", json={"name": "Notes", "kind": "free_text"})
    resp = env.client.post(f"{base}/annotations", json={
        "tier": "Notes", "start_ms": 5000, "end_ms": 7000, "value": "late",
    })
    assert_envelope(resp, 422, "OUT_OF_RANGE")


def test_missing_body_field_is_validation_error(env):
    base = _seeded(env)
    resp = env.client.post(f"{base}/annotations", json={
        "tier": "Notes", "start_ms": 0, "end_ms": 100,
    })
    err = assert_envelope(resp, 422, "VALIDATION")
    assert "value" in err["field"]


def test_mutations_survive_restart(env):
    base = _seeded(env)
    env.client.post(f"{base}/tiers", json={"name": "Notes", "kind": "free_text"})
    env.client.post(f"{base}/annotations", json={
        "tier": "Notes", "start_ms": 100, "end_ms": 900, "value": "kept"})
    before = env.client.get(base).json()

    reborn = TestClient(create_app(env.dirs))
    assert reborn.get(base).json() == before


# -- stats and exports ------------------------------------------------------

def _populate(env):
    base = _seeded(env)
    env.client.post(f"{base}/tiers", json={
        "name": "Gaze", "kind": "codebook", "codebook_ref": "social-cues"})
    env.client.post(f"{base}/tiers", json={"name": "Notes", "kind": "free_text"})
    for tier, start, end, value in [
        ("Gaze", 0, 1000, "smile"),
        ("Gaze", 2000, 2500, "nod"),
        ("Notes", 500, 1500, "greeting"),
    ]:
        resp = env.client.post(f"{base}/annotations", json={
            "tier": tier, "start_ms": start, "end_ms": end, "value": value})
        assert resp.status_code == 200
    return base


def test_stats_endpoint_matches_direct_compute(env):
    base = _populate(env)
    got = env.client.get(f"{base}/stats").json()
    project = env.app.state.store.get(env.bag_id)
    overall, tiers = compute_all(project, include_transcript=True)
    assert got == json.loads(json.dumps(stats_to_json(overall, tiers)))
    assert got["overall"]["occurrences"] == 3


def test_stats_transcript_toggle(env):
    env.process(transcribe=True)
    env.create_project()
    base = f"/api/projects/{env.bag_id}"
    with_t = env.client.get(f"{base}/stats").json()
    without = env.client.get(f"{base}/stats",
                             params={"include_transcript": "false"}).json()
    assert with_t["overall"]["occurrences"] == 2
    assert without["overall"]["occurrences"] == 0
    assert set(with_t["tiers"]) == {"Speaker 1", "Speaker 2"}
    assert without["tiers"] == {}


def test_export_csv_endpoint(env):
    base = _populate(env)
    resp = env.client.get(f"{base}/export/csv")
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/csv")
    assert env.bag_id in resp.headers["content-disposition"]
    assert resp.text == export_csv(env.app.state.store.get(env.bag_id))
    assert resp.text.splitlines()[0] == "tier,content,start_time,end_time"


def test_export_stats_endpoint(env):
    base = _populate(env)
    as_csv = env.client.get(f"{base}/export/stats")
    assert as_csv.headers["content-type"].startswith("text/csv")
    header = as_csv.text.splitlines()[0]
    assert header.startswith("scope,count,frequency_per_min")

    as_json = env.client.get(f"{base}/export/stats", params={"format": "json"})
    doc = json.loads(as_json.text)
    assert doc["overall"]["occurrences"] == 3


# -- media byte ranges ------------------------------------------------------

def test_media_full_and_ranges(env):
    manifest = env.process()
    video_path = env.dirs.processed_for(env.bag_id) / manifest["video"]["path"]
    data = video_path.read_bytes()
    size = len(data)
    url = f"/media/{env.bag_id}/video"

    full = env.client.get(url)
    assert full.status_code == 200
    assert full.headers["accept-ranges"] == "bytes"
    assert full.headers["content-type"] == "video/x-msvideo"
    assert full.content == data

    bounded = env.client.get(url, headers={"Range": "bytes=0-99"})
    assert bounded.status_code == 206
    assert bounded.content == data[:100]
    assert bounded.headers["content-range"] == f"bytes 0-99/{size}"
    assert bounded.headers["content-length"] == "100"

    open_ended = env.client.get(url, headers={"Range": "bytes=200-"})
    assert open_ended.status_code == 206
    assert open_ended.content == data[200:]
    assert open_ended.headers["content-range"] == f"bytes 200-{size - 1}/{size}"

    suffix = env.client.get(url, headers={"Range": "bytes=-50"})
    assert suffix.status_code == 206
    assert suffix.content == data[-50:]
    assert suffix.headers["content-range"] == f"bytes {size - 50}-{size - 1}/{size}"

    past_end = env.client.get(url, headers={"Range": f"bytes={size}-"})
    assert past_end.status_code == 416
    assert past_end.headers["content-range"] == f"bytes */{size}"

    nonsense = env.client.get(url, headers={"Range": "bytes=tuna-salad"})
    assert nonsense.status_code == 416

    # Servers may clamp an overlong end instead of erroring.
    clamped = env.client.get(url, headers={"Range": f"bytes=0-{size * 2}"})
    assert clamped.status_code == 206
    assert clamped.content == data


def test_media_audio_is_wav(env):
    env.process()
    resp = env.client.get(f"/media/{env.bag_id}/audio",
                          headers={"Range": "bytes=0-3"})
    assert resp.status_code == 206
    assert resp.content == b"RIFF"
    assert resp.headers["content-type"] == "audio/wav"


def test_media_error_paths(env):
    assert_envelope(
        env.client.get(f"/media/{env.bag_id}/video"), 404, "NOT_FOUND")
    env.process()
    assert_envelope(
        env.client.get(f"/media/{env.bag_id}/subtitles"), 404, "NOT_FOUND")
    assert_envelope(
        env.client.get("/media/feedfacefeedface/video"), 404, "NOT_FOUND")


# -- chat -------------------------------------------------------------------

CHAT_REPLY = """Here is what I noticed.

```json
[
  {"tier": "Gaze-llm", "start": 100, "end": 400, "value": "watching"},
  {"tier": "Gaze-llm", "start": 900, "end": 1300, "value": "away"},
  {"tier": "Gaze-llm", "start": 9, "end": 9, "value": "empty"}
]
```"""


def test_chat_applies_suggestions(env):
    env.chat_text = CHAT_REPLY
    env.process(transcribe=True)
    env.create_project()
    resp = env.client.post(f"/api/projects/{env.bag_id}/chat", json={
        "instruction": "mark gaze shifts",
    })
    assert resp.status_code == 200, resp.text
    body = resp.json()
    assert body["assistant_text"] == CHAT_REPLY
    assert body["created_tiers"] == ["Gaze-llm"]
    assert body["applied"] == 2
    assert len(body["rejected"]) == 1
    assert set(body["rejected"][0]) == {"item", "reason"}

    project = env.client.get(f"/api/projects/{env.bag_id}").json()
    tier = next(t for t in project["tiers"] if t["name"] == "Gaze-llm")
    assert tier["origin"] == "llm"
    assert [(a["start_ms"], a["end_ms"]) for a in tier["annotations"]] == [
        (100, 400), (900, 1300)]

    # Default privacy mode keeps every frame out of the request.
    (client,) = env.chat_clients
    context = client.contexts[0]
    assert context.frames == ()
    assert context.instruction == "mark gaze shifts"
    assert any("hello robot" in line.text for line in context.transcript)


def test_chat_privacy_mode_attaches_frames(env):
    env.chat_text = CHAT_REPLY
    env.process()
    env.create_project()
    resp = env.client.post(f"/api/projects/{env.bag_id}/chat", json={
        "instruction": "look",
        "privacy_mode": "allow_all_frames",
        "frames_per_minute": 30.0,
    })
    assert resp.status_code == 200
    (client,) = env.chat_clients
    frames = client.contexts[0].frames
    assert len(frames) == 3  # one per 2 s across a 6 s window
    assert all(f.jpeg.startswith(b"\xff\xd8") for f in frames)


def test_chat_without_json_is_a_note_not_an_error(env):
    env.chat_text = "I could not find anything noteworthy."
    env.process()
    env.create_project()
    resp = env.client.post(f"/api/projects/{env.bag_id}/chat",
                           json={"instruction": "anything?"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["applied"] == 0
    assert body["created_tiers"] == []
    assert "note" in body
    project = env.client.get(f"/api/projects/{env.bag_id}").json()
    assert project["tiers"] == []


def test_chat_model_passthrough(env):
    env.chat_text = "nothing"
    env.process()
    env.create_project()
    env.client.post(f"/api/projects/{env.bag_id}/chat", json={
        "instruction": "x", "model": "tiny-vision"})
    assert env.chat_clients[-1].model == "tiny-vision"


def test_chat_bad_privacy_mode(env):
    env.process()
    env.create_project()
    resp = env.client.post(f"/api/projects/{env.bag_id}/chat", json={
        "instruction": "x", "privacy_mode": "shrug"})
    assert_envelope(resp, 422, "BAD_POLICY")

"""HTTP backend: wire mapping, schema conformance, retry contract, playback."""

from __future__ import annotations

import json

import jsonschema
import pytest

from craftbench.craftworld import Task, Verb, generate_world
from craftbench.curriculum import (
    CONVENTIONAL,
    PREDICTIVE,
    HistoryEntry,
    PromptBundle,
    build_prompt,
    bundle_hash,
)
from craftbench.errors import PlaybackError, TransportError
from craftbench.perception import (
    observe_cheat,
    render_frame,
    encode_elements,
    vision_prompt_text,
)
from craftbench.planner.http import EndpointConfig, HttpBackend
from craftbench.planner.playback import PlaybackBackend
from craftbench.planner.transcript import (
    IterationRecord,
    Transcript,
    TranscriptWriter,
    bundle_to_json,
)
from craftbench.planner.wire import REQUEST_SCHEMA, build_chat_request

from stub_server import StubChatServer

VISION_PROMPT = """You are a great assistant to infer information from images.
This image is a Minecraft play screen.
My ultimate goal is to create a gold pickaxe.
Please guess what information you think would be useful to the player and give the information by reading that information from the image.
"""

TABLE5_CONVENTIONAL = """Reasoning: The player has mined gold ore but has not smelted it yet. Since the player's ultimate goal is to create a golden pickaxe, they need to smelt the gold ore to obtain gold ingots. The player has a furnace in their inventory, so they can use it to smelt the gold ore.

Task: Smelt 3 raw gold.
"""


def _config(url, retries=2):
    return EndpointConfig(url=url, model="stub-model", retries=retries)


def _bundle(world, mode=CONVENTIONAL, vision=None):
    return build_prompt(observe_cheat(world), vision, (), "craft a golden pickaxe", mode)


class TestWireMapping:
    def test_two_messages_without_attachment(self, world7):
        request = build_chat_request(_bundle(world7), "m", 0.0, 256)
        assert len(request.messages) == 2
        assert request.messages[0].role == "system"
        assert request.messages[1].role == "user"
        assert request.messages[1].attachment is None

    def test_frame_ships_as_attachment(self, world7):
        frame = render_frame(world7)
        request = build_chat_request(_bundle(world7, vision=frame), "m", 0.0, 256)
        assert request.messages[1].attachment == frame.serialize()

    def test_request_validates_against_schema(self, world7):
        request = build_chat_request(_bundle(world7), "m", 0.0, 256)
        jsonschema.validate(request.to_json(), REQUEST_SCHEMA)


class TestVisionPrompt:
    def test_stored_prompt_is_byte_exact(self):
        assert vision_prompt_text() == VISION_PROMPT

    def test_live_free_encoding_sends_the_exact_prompt(self, world7):
        from craftbench.perception import encode_free

        script = [(200, {"text": "gold ore to the east", "finish_reason": "stop"})]
        with StubChatServer(script) as server:
            backend = HttpBackend(
                EndpointConfig(url=server.url, model="m", multimodal=True),
                sleeper=lambda s: None,
            )
            frame = render_frame(world7)
            text = encode_free(frame, "craft a golden pickaxe", backend)
            assert text == "gold ore to the east"
            sent = server.requests[0]
            assert sent["messages"][-1]["content"] == VISION_PROMPT
            assert sent["messages"][-1]["attachment"] == frame.serialize()


class TestHttpPropose:
    def test_returns_stub_text_verbatim(self, world7):
        script = [(200, {"text": TABLE5_CONVENTIONAL, "finish_reason": "stop"})]
        with StubChatServer(script) as server:
            backend = HttpBackend(_config(server.url), sleeper=lambda s: None)
            assert backend.propose(_bundle(world7)) == TABLE5_CONVENTIONAL

    def test_500_thrice_with_cap_two_raises_typed_error(self, world7):
        script = [(500, {"error": "boom"})] * 3
        with StubChatServer(script) as server:
            backend = HttpBackend(_config(server.url, retries=2), sleeper=lambda s: None)
            with pytest.raises(TransportError) as err:
                backend.propose(_bundle(world7))
            assert err.value.kind == "status"
            assert len(server.requests) == 3  # 1 attempt + 2 retries

    def test_recovers_after_transient_failures(self, world7):
        script = [
            (500, {"error": "boom"}),
            (503, {"error": "busy"}),
            (200, {"text": "Task: Mine 3 stone.", "finish_reason": "stop"}),
        ]
        with StubChatServer(script) as server:
            backend = HttpBackend(_config(server.url, retries=2), sleeper=lambda s: None)
            assert backend.propose(_bundle(world7)) == "Task: Mine 3 stone."
            assert len(server.requests) == 3

    def test_non_retryable_status_fails_fast(self, world7):
        script = [(400, {"error": "bad request"})]
        with StubChatServer(script) as server:
            backend = HttpBackend(_config(server.url), sleeper=lambda s: None)
            with pytest.raises(TransportError):
                backend.propose(_bundle(world7))
            assert len(server.requests) == 1

    def test_malformed_body_fails_fast(self, world7):
        script = [(200, {"unexpected": True})]
        with StubChatServer(script) as server:
            backend = HttpBackend(_config(server.url), sleeper=lambda s: None)
            with pytest.raises(TransportError) as err:
                backend.propose(_bundle(world7))
            assert err.value.kind == "malformed"

    def test_backoff_schedule(self, world7):
        sleeps: list[float] = []
        script = [(500, {})] * 4
        with StubChatServer(script) as server:
            backend = HttpBackend(
                EndpointConfig(url=server.url, model="m", retries=3, backoff_base_s=0.5),
                sleeper=sleeps.append,
            )
            with pytest.raises(TransportError):
                backend.propose(_bundle(world7))
        assert sleeps == [0.5, 1.0, 2.0]

    def test_credential_header_from_env(self, world7, monkeypatch):
        monkeypatch.setenv("CRAFTBENCH_API_KEY", "sk-test")
        captured = {}

        class FakeResponse:
            status_code = 200

            @staticmethod
            def json():
                return {"text": "ok", "finish_reason": "stop"}

        def fake_post(url, json=None, headers=None, timeout=None):
            captured["headers"] = headers
            return FakeResponse()

        monkeypatch.setattr("craftbench.planner.http.requests.post", fake_post)
        backend = HttpBackend(_config("http://unused"), sleeper=lambda s: None)
        backend.propose(_bundle(world7))
        assert captured["headers"]["Authorization"] == "Bearer sk-test"


class TestFuzzedCorpusSchema:
    def test_200_fuzzed_bundles_validate(self):
        """Requests generated from a fuzzed state corpus all satisfy the schema."""
        import numpy as np

        rng = np.random.default_rng(42)
        bodies = []
        for i in range(200):
            world = generate_world(int(rng.integers(0, 50)))
            inventory = {}
            for item in ("stick", "raw_gold", "spruce_planks", "furnace"):
                n = int(rng.integers(0, 5))
                if n:
                    inventory[item] = n
            world = world.evolve(inventory=inventory, tick=int(rng.integers(0, 1200)))
            mode = PREDICTIVE if i % 2 else CONVENTIONAL
            vision = None
            if i % 4 == 2:
                vision = render_frame(world)
            elif i % 4 == 3:
                vision = encode_elements(render_frame(world))
            history = tuple(
                HistoryEntry(Task(Verb.MINE, "stone", 2), bool(j % 2), "missing_ingredients")
                for j in range(int(rng.integers(0, 4)))
            )
            bundle = build_prompt(
                observe_cheat(world), vision, history, "craft a golden pickaxe", mode
            )
            bodies.append(build_chat_request(bundle, "m", 0.0, 512).to_json())
        for body in bodies:
            jsonschema.validate(body, REQUEST_SCHEMA)


class TestPlayback:
    def _write_transcript(self, path, bundles_and_responses):
        with TranscriptWriter(path) as writer:
            writer.write_header({"arm": "2-1"}, {"name": "stub", "model": "m"})
            for i, (bundle, response) in enumerate(bundles_and_responses, start=1):
                writer.write_iteration(
                    IterationRecord(
                        iteration=i,
                        prompt_hash=bundle_hash(bundle),
                        bundle=bundle_to_json(bundle),
                        raw_response=response,
                        parsed=None,
                        parse_error=None,
                        adopted=None,
                        outcome=None,
                        milestones=[],
                        vision_na={},
                        timestamps={"at": 123.0},
                    )
                )

    def test_replay_identical_prompts(self, world7, tmp_path):
        path = tmp_path / "t.jsonl"
        bundle = _bundle(world7)
        self._write_transcript(path, [(bundle, "Task: Obtain a wood log.")])
        backend = PlaybackBackend(path, strict=True)
        assert backend.propose(bundle) == "Task: Obtain a wood log."
        assert backend.mismatches == []

    def test_cursor_exhausted(self, world7, tmp_path):
        path = tmp_path / "t.jsonl"
        bundle = _bundle(world7)
        self._write_transcript(path, [(bundle, "Task: Obtain a wood log.")])
        backend = PlaybackBackend(path)
        backend.propose(bundle)
        with pytest.raises(PlaybackError) as err:
            backend.propose(bundle)
        assert err.value.kind == "exhausted"

    def test_tampered_prompt_flagged(self, world7, tmp_path):
        path = tmp_path / "t.jsonl"
        bundle = _bundle(world7)
        self._write_transcript(path, [(bundle, "Task: Obtain a wood log.")])
        edited = PromptBundle(
            system_text=bundle.system_text + " EDITED",
            user_text=bundle.user_text,
            mode=bundle.mode,
        )
        strict = PlaybackBackend(path, strict=True)
        with pytest.raises(PlaybackError) as err:
            strict.propose(edited)
        assert err.value.kind == "hash_mismatch"
        lenient = PlaybackBackend(path, strict=False)
        assert lenient.propose(edited) == "Task: Obtain a wood log."
        assert len(lenient.mismatches) == 1

    def test_transcript_round_trip(self, world7, tmp_path):
        path = tmp_path / "t.jsonl"
        bundle = _bundle(world7)
        self._write_transcript(path, [(bundle, "x"), (bundle, "y")])
        transcript = Transcript.load(path)
        assert transcript.header["config"] == {"arm": "2-1"}
        assert [r["raw_response"] for r in transcript.iterations] == ["x", "y"]

"""Chat-completions client for the annotation assistant.

Speaks the common chat-completions HTTP shape so hosted APIs and local
model servers work interchangeably via a base-URL override.  Frames are
attached as base64 data URLs.  Transport failures retry with exponential
backoff; an oversized payload is retried once with half the frames.
"""

from __future__ import annotations

import base64
import itertools
import os
import time
from dataclasses import dataclass, field

import httpx

from rosann.errors import RosannError
from rosann.llm.context import ChatContext, SYSTEM_PROMPT

ENV_API_KEY = "OPENAI_API_KEY"
ENV_BASE_URL = "CHAT_BASE_URL"
DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-4o"

_session_counter = itertools.count(1)


class AuthError(RosannError):
    code = "AUTH"


class TransportError(RosannError):
    code = "TRANSPORT"

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempt(s))")
        self.attempts = attempts


@dataclass(frozen=True, slots=True)
class ChatTurn:
    role: str  # system | user | assistant
    content: str
    attachments: int = 0


@dataclass(slots=True)
class ChatTranscript:
    session_id: str
    turns: list[ChatTurn] = field(default_factory=list)

    def append(self, role: str, content: str, attachments: int = 0) -> None:
        self.turns.append(ChatTurn(role, content, attachments))


def _frame_attachment(jpeg: bytes) -> dict:
    encoded = base64.b64encode(jpeg).decode("ascii")
    return {
        "type": "image_url",
        "image_url": {"url": f"data:image/jpeg;base64,{encoded}"},
    }


def build_request_body(context: ChatContext, model: str,
                       frame_limit: int | None = None) -> dict:
    frames = context.frames
    if frame_limit is not None:
        frames = frames[:frame_limit]
    user_content: list[dict] = [{"type": "text", "text": context.user_text()}]
    user_content.extend(_frame_attachment(f.jpeg) for f in frames)
    return {
        "model": model,
        "messages": [
            {"role": "system", "content": SYSTEM_PROMPT},
            {"role": "user", "content": user_content},
        ],
    }


class ChatClient:
    """One chat session against a chat-completions endpoint."""

    def __init__(
        self,
        api_key: str | None = None,
        base_url: str | None = None,
        model: str = DEFAULT_MODEL,
        attempts: int = 3,
        timeout: float = 120.0,
        http_client: httpx.Client | None = None,
        sleep=time.sleep,
    ):
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY)
        self.base_url = (base_url or os.environ.get(ENV_BASE_URL)
                         or DEFAULT_BASE_URL).rstrip("/")
        self.model = model
        self.attempts = attempts
        self.timeout = timeout
        self._http = http_client
        self._sleep = sleep
        self.transcript = ChatTranscript(f"chat-{next(_session_counter)}")

    def request_annotations(self, context: ChatContext) -> str:
        """Send one turn; returns the assistant's reply text verbatim."""
        if not self.api_key:
            raise AuthError(f"{ENV_API_KEY} is not set")
        client = self._http or httpx.Client(timeout=self.timeout)
        owns = self._http is None
        try:
            text = self._post_with_retries(client, context)
        finally:
            if owns:
                client.close()
        self.transcript.append("system", SYSTEM_PROMPT)
        self.transcript.append("user", context.user_text(), len(context.frames))
        self.transcript.append("assistant", text)
        return text

    def _post_with_retries(self, client: httpx.Client,
                           context: ChatContext) -> str:
        url = f"{self.base_url}/chat/completions"
        headers = {"Authorization": f"Bearer {self.api_key}"}
        body = build_request_body(context, self.model)
        halved = False
        last_error = "no attempt made"
        attempt = 0
        while attempt < self.attempts:
            attempt += 1
            try:
                resp = client.post(url, json=body, headers=headers)
            except httpx.HTTPError as exc:
                last_error = str(exc) or type(exc).__name__
            else:
                if resp.status_code == 200:
                    return self._extract_text(resp)
                if resp.status_code in (401, 403):
                    raise AuthError(f"endpoint rejected key: HTTP {resp.status_code}")
                if resp.status_code == 413 and not halved:
                    halved = True
                    keep = max(len(context.frames) // 2, 0)
                    body = build_request_body(context, self.model, frame_limit=keep)
                    attempt -= 1  # the halved retry does not consume an attempt
                    continue
                last_error = f"HTTP {resp.status_code}"
            if attempt < self.attempts:
                self._sleep(min(2.0 ** (attempt - 1), 8.0))
        raise TransportError(last_error, attempts=self.attempts)

    @staticmethod
    def _extract_text(resp: httpx.Response) -> str:
        try:
            payload = resp.json()
            return payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            # Not the expected envelope; hand back the raw body so the
            # suggestion parser can still look for JSON in it.
            return resp.text

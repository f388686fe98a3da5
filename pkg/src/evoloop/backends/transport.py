"""HTTP transport for the model-service protocol.

All three services speak the same envelope: POST a JSON object, receive a
JSON object; non-2xx responses carry {error, detail}. This module performs
exactly one attempt per call; retry policy lives in batch.with_retry.
"""

from __future__ import annotations

import requests

from ..errors import PermanentBackendError, TransientBackendError

TTS_PATH = "/v1/tts"
TRANSLATE_PATH = "/v1/translate"
SCORE_PATH = "/v1/score"


class HttpTransport:
    def __init__(self, base_url: str, timeout_s: float = 30.0, token: str | None = None):
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s
        self._session = requests.Session()
        if token:
            self._session.headers["Authorization"] = f"Bearer {token}"

    def post(self, path: str, payload: dict) -> dict:
        url = self.base_url + path
        try:
            resp = self._session.post(url, json=payload, timeout=self.timeout_s)
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise TransientBackendError(f"{url}: {exc}") from exc
        if 200 <= resp.status_code < 300:
            try:
                return resp.json()
            except ValueError as exc:
                raise PermanentBackendError(resp.status_code, "bad-json", str(exc)) from exc
        try:
            body = resp.json()
        except ValueError:
            body = {}
        error = body.get("error", "")
        detail = body.get("detail", "")
        if resp.status_code >= 500:
            raise TransientBackendError(
                f"{url}: HTTP {resp.status_code} {error} {detail}".rstrip()
            )
        raise PermanentBackendError(resp.status_code, error, detail)

    # endpoint-shaped helpers so transports and mocks expose the same surface
    def tts(self, payload: dict) -> dict:
        return self.post(TTS_PATH, payload)

    def translate(self, payload: dict) -> dict:
        return self.post(TRANSLATE_PATH, payload)

    def score(self, payload: dict) -> dict:
        return self.post(SCORE_PATH, payload)

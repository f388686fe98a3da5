"""Model-service clients: transports, mocks, caching, batching."""

from .batch import (
    DEFAULT_FAILURE_BUDGET,
    BatchResult,
    enforce_failure_budget,
    run_batch,
    with_retry,
)
from .cache import ContentCache, NullCache, payload_hash
from .clients import (
    BEAM,
    DURATION_LIMIT_S,
    TEMPERATURE,
    DecodeConfig,
    EndpointConfig,
    Hypothesis,
    ScoreClient,
    ScoreTriple,
    TranslateClient,
    TranslationMode,
    TtsClient,
    resolve_uri,
)
from .transport import HttpTransport

__all__ = [
    "BEAM",
    "DEFAULT_FAILURE_BUDGET",
    "DURATION_LIMIT_S",
    "TEMPERATURE",
    "BatchResult",
    "ContentCache",
    "DecodeConfig",
    "EndpointConfig",
    "HttpTransport",
    "Hypothesis",
    "NullCache",
    "ScoreClient",
    "ScoreTriple",
    "TranslateClient",
    "TranslationMode",
    "TtsClient",
    "enforce_failure_budget",
    "payload_hash",
    "resolve_uri",
    "run_batch",
    "with_retry",
]

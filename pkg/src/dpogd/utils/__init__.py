from .helpers import (
    MANIFEST_PREFIX,
    StreamKey,
    derive_rng,
    array_digest,
    canonical_hash,
    write_json,
    write_csv,
    read_csv,
    await_sync_function,
)

__all__: list[str] = [
    "MANIFEST_PREFIX",
    "StreamKey",
    "derive_rng",
    "array_digest",
    "canonical_hash",
    "write_json",
    "write_csv",
    "read_csv",
    "await_sync_function",
]

import asyncio
import contextvars
import functools
import hashlib
import json
from concurrent.futures import Executor
from enum import IntEnum
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pandas as pd
from logzero import logger

MANIFEST_PREFIX = "# manifest="


class StreamKey(IntEnum):
    """Spawn keys of the independent random streams derived from one run seed."""

    TARGET = 0
    SLOT = 1
    GRAPH = 2
    BASIS = 3
    INIT = 4


def derive_rng(seed: int, key: StreamKey, *index: int) -> np.random.Generator:
    """
    Derive an independent generator from a run seed.

    The generator depends only on (seed, key, index), so the data of any slot
    can be regenerated without replaying earlier slots.

    Args:
        seed: The run seed.
        key: The stream the generator belongs to.
        *index: Optional further spawn key components (e.g., the slot index).

    Returns:
        np.random.Generator: A PCG64 generator seeded from the derived SeedSequence.
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(int(key), *index))
    return np.random.default_rng(sequence)


def array_digest(array: np.ndarray) -> str:
    """
    Compute a sha256 digest of an array's dtype, shape and bytes.

    Args:
        array: The array to hash.

    Returns:
        str: Hex digest.
    """
    contiguous = np.ascontiguousarray(array)
    digest = hashlib.sha256()
    digest.update(str(contiguous.dtype).encode())
    digest.update(str(contiguous.shape).encode())
    digest.update(contiguous.tobytes())
    return digest.hexdigest()


def canonical_hash(data: dict[str, Any]) -> str:
    """
    Hash a JSON-serializable mapping independently of key order.

    Args:
        data: The mapping to hash.

    Returns:
        str: Hex sha256 digest of the canonical JSON encoding.
    """
    encoded = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(encoded.encode()).hexdigest()


def write_json(path: Path, data: dict[str, Any]) -> None:
    """
    Write a mapping as indented, key-sorted JSON.

    Args:
        path: Destination file.
        data: JSON-serializable mapping.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n")


def write_csv(frame: pd.DataFrame, path: Path, manifest_hash: str) -> None:
    """
    Write a data frame as CSV preceded by a manifest reference line.

    Args:
        frame: The table to write.
        path: Destination file.
        manifest_hash: Hash of the manifest of the instance that produced the table.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        handle.write(f"{MANIFEST_PREFIX}{manifest_hash}\n")
        frame.to_csv(handle, index=False, float_format="%.17g", lineterminator="\n")
    logger.debug(f"Wrote {path} ({len(frame)} rows)")


def read_csv(path: Path) -> tuple[pd.DataFrame, str | None]:
    """
    Read a CSV written by `write_csv`.

    Args:
        path: Source file.

    Returns:
        tuple[pd.DataFrame, str | None]: The table and the referenced manifest hash,
            or None when the file carries no manifest line.

    Raises:
        FileNotFoundError: If the file does not exist.
    """
    if not path.exists():
        raise FileNotFoundError(f"CSV file {path} not found")
    with path.open() as handle:
        first = handle.readline().strip()
    manifest_hash = first[len(MANIFEST_PREFIX):] if first.startswith(MANIFEST_PREFIX) else None
    return pd.read_csv(path, comment="#"), manifest_hash


def await_sync_function(func: Callable, executor: Executor | None = None) -> Callable:
    """
    Wrap a synchronous function to run asynchronously in an executor.

    Args:
        func: The blocking callable.
        executor: Executor to run it in (default: the loop's default executor).

    Returns:
        Callable: A coroutine function with the same arguments.
    """

    @functools.wraps(func)
    async def wrapper(*args, **kwargs):
        loop = asyncio.get_running_loop()
        context = contextvars.copy_context()
        call = functools.partial(func, *args, **kwargs)
        return await loop.run_in_executor(executor, context.run, call)

    return wrapper

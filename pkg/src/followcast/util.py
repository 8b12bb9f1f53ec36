"""Small shared helpers."""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor


def parallel_map(fn, items, threads: int = 1) -> list:
    """Order-preserving map, optionally over a thread pool.

    Results are always collected in input order, so output never depends
    on the worker count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def stable_offset(*parts) -> int:
    """Deterministic 62-bit offset derived from string/number parts; used to
    give each experiment cell its own seed stream."""
    text = "\x1f".join(str(part) for part in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 2

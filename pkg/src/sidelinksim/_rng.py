"""Named random substreams derived from a single root seed."""

import zlib

import numpy as np


def stream(seed: int, name: str, *key: int) -> np.random.Generator:
    """Independent generator for ``name`` under ``seed``.

    The same (seed, name, key) always yields the same stream, and streams with
    different names never share state, so consuming one (e.g. retransmission
    redraws) cannot shift another (e.g. transmitter selection).
    """
    tag = zlib.crc32(name.encode("utf-8"))
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, tag, *[int(k) for k in key]])
    return np.random.default_rng(ss)

"""Deterministic seed derivation.

Every random quantity in the package flows from one master seed through the
split rule below, so a run is reproducible bit for bit from its
configuration.
"""

import hashlib


def derive_seed(master: int, *labels) -> int:
    """Derive a child seed from a master seed and a label path.

    Split rule (fixed): SHA-256 over the UTF-8 string
    ``"{master}:{label1}:{label2}:..."``, truncated to the first 8 bytes,
    read big endian.
    """
    material = ":".join(str(part) for part in (master, *labels))
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")

"""On-disk cache of enumerated groups.

Binary layout: magic ``MCDW1``, then little-endian uint32 degree and
generator count, then the generator images row-major as uint32. A JSON
sidecar next to each file records the parameters and the order.
"""
import json
import logging
import os
import struct
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from mcdw.core.group import DenseGroup
from mcdw.core.params import h_exponent, j_exponent
from mcdw.models.params import Family, FamilyParams

logger = logging.getLogger(__name__)

MAGIC = b"MCDW1"
HEADER = struct.Struct("<II")


class CacheError(OSError):
    """Raised when a cache file is unreadable or malformed."""


def _key_exponent(params: FamilyParams) -> int:
    family = params.family
    quotient = family.kind != "J" and (family.index == 3 or (family.index == 2 and params.m == 1))
    # H3/K3, and H2/K2 at m = 1, are built as quotients of J
    if family.kind == "J" or quotient:
        return j_exponent(params)
    return h_exponent(params)


def cache_key(params: FamilyParams) -> str:
    """File stem for ``params``; alpha is reduced modulo the exponent of the presentation it is built from."""
    if params.family is Family.G:
        return f"G_b{params.beta}"
    exponent = _key_exponent(params)
    return f"{params.family.value}_p{params.p}_m{params.m}_a{params.alpha % exponent}"


def write_tables(path: Path, tables: Sequence[np.ndarray]) -> None:
    """Write permutation images atomically (temp file + rename)."""
    degree = len(tables[0])
    payload = np.stack([np.asarray(t, dtype="<u4") for t in tables])
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(MAGIC)
            f.write(HEADER.pack(degree, len(tables)))
            f.write(payload.tobytes(order="C"))
        os.replace(temp_name, path)
    except Exception:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise


def read_tables(path: Path) -> List[np.ndarray]:
    """Read permutation images written by :func:`write_tables`.

    Raises:
        CacheError: If the magic, header or payload size is wrong
    """
    data = path.read_bytes()
    if not data.startswith(MAGIC):
        raise CacheError(f"Not a group cache file (bad magic): {path}")
    offset = len(MAGIC)
    if len(data) < offset + HEADER.size:
        raise CacheError(f"Truncated cache header: {path}")
    degree, count = HEADER.unpack_from(data, offset)
    offset += HEADER.size
    expected = degree * count * 4
    if len(data) - offset != expected:
        raise CacheError(f"Cache payload has {len(data) - offset} bytes, expected {expected}: {path}")
    images = np.frombuffer(data, dtype="<u4", offset=offset).reshape(count, degree)
    return [images[i].astype(np.intp) for i in range(count)]


def _write_json(path: Path, payload: Dict[str, Any]) -> None:
    fd, temp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
        os.replace(temp_name, path)
    except Exception:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise


class GroupCache:
    """Directory of cached groups keyed by family parameters."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def paths(self, params: FamilyParams):
        stem = self.directory / cache_key(params)
        return stem.with_suffix(".mcdw"), stem.with_suffix(".json")

    def load(self, params: FamilyParams) -> Optional[DenseGroup]:
        binary, sidecar = self.paths(params)
        if not binary.exists():
            return None
        try:
            tables = read_tables(binary)
        except (CacheError, OSError) as e:
            logger.warning("Ignoring unreadable cache entry %s: %s", binary, e)
            return None
        logger.info("Cache hit for %s (%s)", params.label(), binary.name)
        names = ("A", "B")
        if sidecar.exists():
            try:
                names = tuple(json.loads(sidecar.read_text(encoding="utf-8")).get("generator_names", names))
            except (OSError, json.JSONDecodeError):
                pass
        return DenseGroup(tables, name=params.label(), generator_names=names)

    def save(self, params: FamilyParams, group: DenseGroup) -> Path:
        binary, sidecar = self.paths(params)
        write_tables(binary, group.tables)
        _write_json(sidecar, {
            "params": params.model_dump(mode="json"),
            "order": group.order,
            "generator_names": list(group.generator_names),
        })
        logger.info("Cached %s at %s", params.label(), binary)
        return binary

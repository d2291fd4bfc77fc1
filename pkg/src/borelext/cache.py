"""On-disk cache for resolutions.

File layout (all integers big-endian)::

    magic    4 bytes  b"BXRS"
    format   u16      FORMAT_VERSION
    digest   32 bytes sha256 of the payload
    payload  zlib-compressed body

The body starts with the code version and the module key, then ``s_max`` and
``n_max``, then for each filtration the generator degrees followed by the
differentials.  Integers of unbounded size are written as a u32 byte length and
the big-endian bytes; small signed values as i32.  A file whose magic, format,
digest, code version or module key does not match is deleted and ignored.
"""

from __future__ import annotations

import hashlib
import io
import logging
import os
import struct
import tempfile
import zlib
from pathlib import Path
from typing import Optional

from . import __version__
from .modules import GradedModule

log = logging.getLogger(__name__)

MAGIC = b"BXRS"
FORMAT_VERSION = 1
ENV_VAR = "BORELEXT_CACHE_DIR"


def module_key(m: GradedModule) -> str:
    action = ",".join(f"{n}:{c}" for n, c in sorted(m.action))
    return f"cells={','.join(map(str, m.cells))};action={action}"


def cache_path(directory: Path, m: GradedModule) -> Path:
    h = hashlib.sha256(f"{__version__}|{module_key(m)}".encode()).hexdigest()[:32]
    return directory / f"res-{h}.bxrs"


class _Writer:
    def __init__(self):
        self.buf = io.BytesIO()

    def i32(self, v: int):
        self.buf.write(struct.pack(">i", v))

    def u32(self, v: int):
        self.buf.write(struct.pack(">I", v))

    def big(self, v: int):
        raw = v.to_bytes((v.bit_length() + 7) // 8, "big")
        self.u32(len(raw))
        self.buf.write(raw)

    def text(self, s: str):
        raw = s.encode()
        self.u32(len(raw))
        self.buf.write(raw)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ValueError("truncated cache body")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def i32(self) -> int:
        return struct.unpack(">i", self._take(4))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self._take(4))[0]

    def big(self) -> int:
        return int.from_bytes(self._take(self.u32()), "big")

    def text(self) -> str:
        return self._take(self.u32()).decode()


def encode(res) -> bytes:
    w = _Writer()
    w.text(__version__)
    w.text(module_key(res.module))
    w.i32(res.s_max)
    w.i32(res.n_max)
    for s in range(res.s_max + 1):
        degs = res.gens[s]
        w.u32(len(degs))
        for t in degs:
            w.i32(t)
        for d in res.diffs[s]:
            if s == 0:
                w.big(d)
            else:
                w.u32(len(d))
                for g in sorted(d):
                    w.u32(g)
                    w.big(d[g])
    payload = zlib.compress(w.buf.getvalue(), 6)
    return MAGIC + struct.pack(">H", FORMAT_VERSION) + hashlib.sha256(payload).digest() + payload


def decode(blob: bytes, m: GradedModule):
    """``(s_max, n_max, gens, diffs)``; raises ``ValueError`` on any mismatch."""
    if len(blob) < 38 or blob[:4] != MAGIC:
        raise ValueError("bad magic")
    (fmt,) = struct.unpack(">H", blob[4:6])
    if fmt != FORMAT_VERSION:
        raise ValueError(f"unsupported format {fmt}")
    digest, payload = blob[6:38], blob[38:]
    if hashlib.sha256(payload).digest() != digest:
        raise ValueError("digest mismatch")
    r = _Reader(zlib.decompress(payload))
    if r.text() != __version__:
        raise ValueError("written by another code version")
    if r.text() != module_key(m):
        raise ValueError("module mismatch")
    s_max, n_max = r.i32(), r.i32()
    gens, diffs = [], []
    for s in range(s_max + 1):
        degs = [r.i32() for _ in range(r.u32())]
        ds = []
        for _ in degs:
            if s == 0:
                ds.append(r.big())
            else:
                ds.append({r.u32(): r.big() for _ in range(r.u32())})
        gens.append(degs)
        diffs.append(ds)
    if r.pos != len(r.data):
        raise ValueError("trailing bytes")
    return s_max, n_max, gens, diffs


def load(directory: Path, m: GradedModule):
    path = cache_path(directory, m)
    try:
        blob = path.read_bytes()
    except OSError:
        return None
    try:
        return decode(blob, m)
    except (ValueError, zlib.error, struct.error, UnicodeDecodeError) as exc:
        log.warning("discarding corrupt cache entry %s: %s", path.name, exc)
        try:
            path.unlink()
        except OSError:
            pass
        return None


def save(directory: Path, res) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    path = cache_path(directory, res.module)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".bxrs")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(encode(res))
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def directory_from_env() -> Optional[Path]:
    value = os.environ.get(ENV_VAR)
    return Path(value) if value else None

"""On-disk store for Kronecker powers of the Levi-Civita symbol and contractors.

File layout (all integers little-endian)::

    b"HDC1"                       magic; the trailing digit is the format version
    7 x uint64                    kind, d, N, backend, order, side, count
    payload                       sparse: count x (uint64 psi offset, value)
                                  dense:  count values in psi order
    uint64                        BLAKE2b-64 digest of everything above

A rational value is two length-prefixed integers (numerator, denominator),
each a uint64 byte length followed by signed two's-complement bytes.  A
float64 value is an IEEE-754 binary64.  Files are named
``<kind>_d<d>_N<N>_<backend>.hdc`` and written atomically.
"""

from __future__ import annotations

import hashlib
import math
import os
import struct
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import core
from .core import Hypermatrix
from .errors import CorruptionError, StorageError, VersionError
from .hdet import (
    CONTRACTOR_BUDGET,
    FORMAT_VERSION,
    Contractor,
    build_contractor,
    check_contractor_budget,
)
from .levicivita import NNZ_BUDGET, epsilon_kron_power
from .vectorize import SparseTensor

MAGIC_PREFIX = b"HDC"
MAGIC = MAGIC_PREFIX + str(FORMAT_VERSION).encode()

EPSILON_POWER = "epsilon-power"
CONTRACTOR = "contractor"
_KINDS = {EPSILON_POWER: 0, CONTRACTOR: 1}
_BACKENDS = {core.RATIONAL: 0, core.FLOAT64: 1}
_U64 = struct.Struct("<Q")
_F64 = struct.Struct("<d")
_HEADER = struct.Struct("<7Q")


@dataclass(frozen=True)
class CacheKey:
    kind: str
    d: int
    N: int
    backend: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown cache kind {self.kind!r}")
        if self.backend not in _BACKENDS:
            raise ValueError(f"unsupported cache backend {self.backend!r}")
        if self.d < 1 or self.N < 1:
            raise ValueError("cache keys need d, N >= 1")

    @property
    def filename(self) -> str:
        return f"{self.kind}_d{self.d}_N{self.N}_{self.backend}.hdc"


@dataclass(frozen=True, eq=False)
class CacheEntry:
    key: CacheKey
    payload: object  # SparseTensor or Contractor
    checksum: int
    version: int = FORMAT_VERSION


# ---------------------------------------------------------------------------
# serialization


def _int_bytes(n: int) -> bytes:
    raw = n.to_bytes((n.bit_length() + 8) // 8 or 1, "little", signed=True)
    return _U64.pack(len(raw)) + raw


def _value_bytes(x, backend: str) -> bytes:
    if backend == core.RATIONAL:
        x = Fraction(x)
        return _int_bytes(x.numerator) + _int_bytes(x.denominator)
    return _F64.pack(float(x))


def _digest(data: bytes) -> int:
    return _U64.unpack(hashlib.blake2b(data, digest_size=8).digest())[0]


def serialize(key: CacheKey, payload) -> bytes:
    parts = [MAGIC]
    if key.kind == EPSILON_POWER:
        if not isinstance(payload, SparseTensor):
            raise TypeError("epsilon-power entries hold a SparseTensor")
        order, side = payload.order, payload.shape[0]
        parts.append(_HEADER.pack(_KINDS[key.kind], key.d, key.N, _BACKENDS[key.backend],
                                  order, side, payload.nnz))
        for lin, v in zip(payload.linear_indices(), payload.values.tolist()):
            parts.append(_U64.pack(lin))
            parts.append(_value_bytes(v, key.backend))
    else:
        if not isinstance(payload, Contractor):
            raise TypeError("contractor entries hold a Contractor")
        t = payload.tensor
        parts.append(_HEADER.pack(_KINDS[key.kind], key.d, key.N, _BACKENDS[key.backend],
                                  t.order, t.shape[0], t.size))
        if key.backend == core.FLOAT64:
            parts.append(np.ascontiguousarray(t.data, dtype="<f8").tobytes())
        else:
            parts.extend(_value_bytes(v, key.backend) for v in t.data.tolist())
    body = b"".join(parts)
    return body + _U64.pack(_digest(body))


class _Reader:
    def __init__(self, buf: bytes, end: int):
        self.buf, self.pos, self.end = buf, 0, end

    def take(self, n: int) -> bytes:
        if self.pos + n > self.end:
            raise CorruptionError("cache file is truncated")
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def u64(self) -> int:
        return _U64.unpack(self.take(8))[0]

    def integer(self) -> int:
        return int.from_bytes(self.take(self.u64()), "little", signed=True)

    def value(self, backend: str):
        if backend == core.RATIONAL:
            num, den = self.integer(), self.integer()
            if den == 0:
                raise CorruptionError("zero denominator in cache file")
            return Fraction(num, den)
        return _F64.unpack(self.take(8))[0]


def deserialize(buf: bytes) -> CacheEntry:
    if len(buf) < len(MAGIC) or buf[:3] != MAGIC_PREFIX:
        raise CorruptionError("not an HDC cache file")
    if buf[:4] != MAGIC:
        raise VersionError(f"unsupported cache format {buf[:4]!r}; expected {MAGIC!r}")
    if len(buf) < len(MAGIC) + _HEADER.size + 8:
        raise CorruptionError("cache file is truncated")
    body, (stored,) = buf[:-8], _U64.unpack(buf[-8:])
    if _digest(body) != stored:
        raise CorruptionError("checksum mismatch")
    r = _Reader(buf, len(body))
    r.take(4)
    kind_tag, d, N, backend_tag, order, side, count = _HEADER.unpack(r.take(_HEADER.size))
    try:
        kind = {v: k for k, v in _KINDS.items()}[kind_tag]
        backend = {v: k for k, v in _BACKENDS.items()}[backend_tag]
    except KeyError as exc:
        raise CorruptionError(f"unknown tag in header: {exc}") from None
    key = CacheKey(kind, d, N, backend)
    shape = (side,) * order
    if kind == EPSILON_POWER:
        coords, vals = [], []
        for _ in range(count):
            lin = r.u64()
            idx = []
            for _ in range(order):
                lin, rem = divmod(lin, side)
                idx.append(rem)
            coords.append(idx)
            vals.append(r.value(backend))
        vals = [int(v) for v in vals] if backend == core.RATIONAL else vals
        payload = SparseTensor(shape, np.array(coords, dtype=np.int64).reshape(-1, order),
                               np.array(vals), check=False)
    else:
        if count != math.prod(shape):
            raise CorruptionError("dense entry count disagrees with shape")
        if backend == core.FLOAT64:
            flat = np.frombuffer(r.take(8 * count), dtype="<f8").astype(np.float64)
        else:
            flat = np.empty(count, dtype=object)
            for i in range(count):
                flat[i] = r.value(backend)
        tensor = Hypermatrix._wrap(flat.reshape(shape, order="F"), backend)
        payload = Contractor(d, N, tensor, backend)
    if r.pos != r.end:
        raise CorruptionError("trailing bytes after payload")
    return CacheEntry(key, payload, stored, FORMAT_VERSION)


def make_entry(key: CacheKey, payload) -> CacheEntry:
    buf = serialize(key, payload)
    return CacheEntry(key, payload, _U64.unpack(buf[-8:])[0])


# ---------------------------------------------------------------------------
# directory operations


def store(entry: CacheEntry, directory) -> Path:
    """Write ``entry`` atomically under ``directory``; returns the file path."""
    directory = Path(directory)
    path = directory / entry.key.filename
    buf = serialize(entry.key, entry.payload)
    tmp = None
    try:
        directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".hdc", dir=directory)
        with os.fdopen(fd, "wb") as fh:
            fh.write(buf)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)
        raise StorageError(f"cannot write cache file {path}: {exc}") from exc
    return path


def load(key: CacheKey, directory) -> CacheEntry | None:
    """Read the entry for ``key``; ``None`` when no file exists."""
    path = Path(directory) / key.filename
    try:
        buf = path.read_bytes()
    except (FileNotFoundError, NotADirectoryError):
        return None
    entry = deserialize(buf)
    if entry.key != key:
        raise CorruptionError(f"{path} holds {entry.key}, expected {key}")
    return entry


class ContractorStore:
    """Load-or-build access to contractors and Kronecker powers.

    Results are memoized in memory; with a ``directory`` they are also
    persisted and reloaded across processes.  ``builds`` counts fresh
    constructions.
    """

    def __init__(self, directory=None, budget: int = CONTRACTOR_BUDGET):
        self.directory = Path(directory) if directory is not None else None
        self.budget = budget
        self.builds = 0
        self._memo: dict[CacheKey, object] = {}

    def _get(self, key: CacheKey, build):
        if key in self._memo:
            return self._memo[key]
        payload = None
        if self.directory is not None:
            try:
                entry = load(key, self.directory)
            except CorruptionError:
                entry = None  # rebuild and overwrite
            if entry is not None:
                payload = entry.payload
        if payload is None:
            payload = build()
            self.builds += 1
            if self.directory is not None:
                store(make_entry(key, payload), self.directory)
        self._memo[key] = payload
        return payload

    def contractor(self, d: int, N: int, backend: str = core.RATIONAL,
                   budget: int | None = None) -> Contractor:
        budget = self.budget if budget is None else budget
        key = CacheKey(CONTRACTOR, d, N, backend)
        if key not in self._memo:
            check_contractor_budget(d, N, budget)
        return self._get(key, lambda: build_contractor(d, N, backend, budget=budget))

    def epsilon_power(self, d: int, N: int, budget: int = NNZ_BUDGET) -> SparseTensor:
        key = CacheKey(EPSILON_POWER, d, N, core.RATIONAL)
        if key not in self._memo and math.factorial(d) ** N > budget:
            epsilon_kron_power(d, N, budget=budget)  # raises ResourceError
        return self._get(key, lambda: epsilon_kron_power(d, N, budget=budget))


def ensure_contractor(d: int, N: int, directory, budget: int = CONTRACTOR_BUDGET,
                      backend: str = core.RATIONAL) -> Contractor:
    """Load the contractor for ``(d, N)`` from ``directory``, building and storing it if absent."""
    return ContractorStore(directory, budget).contractor(d, N, backend)


_DEFAULT: ContractorStore | None = None


def default_store() -> ContractorStore:
    """Process-wide in-memory store used when callers pass none."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = ContractorStore()
    return _DEFAULT

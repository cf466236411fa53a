"""Pluggable image backend: render contract, deterministic procedural mock,
content-addressed image store, and an HTTP client for an external worker.

The mock renderer is integer-only end to end (fixed-point blends, value
noise from the pinned PRNG, stored-block PNG encoding), so identical
requests produce byte-identical files on any platform or interpreter.
A 48-byte fingerprint of the canonical request is written into the first
pixels, which makes every request field visible in the output bytes by
construction. Images are payload, never control flow: engine behavior is
identical under mock and real backends.
"""

from __future__ import annotations

import hashlib
import struct
import threading
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import httpx
import numpy as np

from .errors import BackendUnavailable, RenderRejected, ValidationError
from .genome import Genome, GanimalId, canonical_id, _fmt
from .rng import RngState

DEFAULT_RESOLUTION = 256
_LATTICE = 16  # noise lattice cells per axis
_Q = 65536  # fixed-point scale (q16)
_FINGERPRINT_BYTES = 48

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


@dataclass(frozen=True)
class RenderRequest:
    class_weights: tuple[tuple[int, float], ...]
    truncation: float
    noise_seed: int
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not self.class_weights:
            raise ValidationError("class_weights must be non-empty")
        ids = [cid for cid, _ in self.class_weights]
        if ids != sorted(ids) or len(set(ids)) != len(ids):
            raise ValidationError("class_weights must be sorted by distinct category id")
        for cid, w in self.class_weights:
            if cid < 0:
                raise ValidationError(f"negative category id {cid}")
            if not (w > 0.0):
                raise ValidationError(f"non-positive weight {w} for category {cid}")
        total = sum(w for _, w in self.class_weights)
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"weights sum to {total!r}, expected 1")
        if not (0.0 < self.truncation <= 1.0):
            raise ValidationError(f"truncation {self.truncation!r} outside (0, 1]")
        if not (0 <= self.noise_seed < 2**64):
            raise ValidationError("noise_seed must fit in u64")
        if self.resolution < 1:
            raise ValidationError("resolution must be >= 1")

    @classmethod
    def from_genome(cls, genome: Genome, resolution: int = DEFAULT_RESOLUTION) -> "RenderRequest":
        return cls(
            class_weights=genome.components,
            truncation=genome.truncation,
            noise_seed=genome.noise_seed,
            resolution=resolution,
        )

    def canonical_string(self) -> str:
        parts = ",".join(f"{cid}:{_fmt(w)}" for cid, w in self.class_weights)
        return (
            f"render-v1|res={self.resolution}|trunc={_fmt(self.truncation)}"
            f"|seed={self.noise_seed}|{parts}"
        )

    def wire_payload(self) -> dict:
        """JSON body for the worker protocol; weights as 17-significant-digit
        decimal strings so the wire is bit-exact."""
        return {
            "class_weights": [[cid, _fmt(w)] for cid, w in self.class_weights],
            "truncation": _fmt(self.truncation),
            "noise_seed": self.noise_seed,
            "resolution": self.resolution,
        }


@dataclass(frozen=True)
class ImageRef:
    content_digest: str
    uri: str
    width: int
    height: int

    def to_dict(self) -> dict:
        return {
            "content_digest": self.content_digest,
            "uri": self.uri,
            "width": self.width,
            "height": self.height,
        }


@dataclass(frozen=True)
class Capability:
    model: str
    max_resolution: int
    supports_blend: bool


class GeneratorBackend(Protocol):
    def capability(self) -> Capability: ...

    def render(self, request: RenderRequest) -> ImageRef: ...


def category_palette(category_id: int) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """Deterministic (dark, light) RGB pair for one category."""
    h = hashlib.blake2b(f"palette-v1|{category_id}".encode("ascii"), digest_size=6).digest()
    dark = (h[0] // 2, h[1] // 2, h[2] // 2)
    light = (128 + h[3] // 2, 128 + h[4] // 2, 128 + h[5] // 2)
    return dark, light


def blend_palette(
    class_weights,
) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """Weight-blend category palettes in q16 fixed point.

    One-hot weights reproduce the category palette exactly; equal weights
    return the channel-wise floor midpoint.
    """
    quantized = [(cid, round(w * _Q)) for cid, w in class_weights]
    total = sum(q for _, q in quantized)
    if total <= 0:
        raise ValidationError("weights quantize to zero")
    dark = [0, 0, 0]
    light = [0, 0, 0]
    for cid, q in quantized:
        d, l = category_palette(cid)
        for c in range(3):
            dark[c] += d[c] * q
            light[c] += l[c] * q
    return (
        tuple(v // total for v in dark),
        tuple(v // total for v in light),
    )


def _noise_field(request: RenderRequest) -> np.ndarray:
    """Bilinear value noise in 0..255, keyed by the full canonical request."""
    res = request.resolution
    rng = RngState.from_key("mock-noise-v1", request.canonical_string())
    side = _LATTICE + 1
    raw = rng.raw_bytes(side * side)
    lattice = np.frombuffer(raw, dtype=np.uint8).astype(np.int64).reshape(side, side)
    pos = np.arange(res, dtype=np.int64) * _LATTICE * _Q // res
    cell = pos >> 16
    frac = pos & 0xFFFF
    cx, cy = cell, cell
    fx = frac[np.newaxis, :]
    fy = frac[:, np.newaxis]
    v00 = lattice[np.ix_(cy, cx)]
    v01 = lattice[np.ix_(cy, cx + 1)]
    v10 = lattice[np.ix_(cy + 1, cx)]
    v11 = lattice[np.ix_(cy + 1, cx + 1)]
    top = v00 * _Q + (v01 - v00) * fx
    bottom = v10 * _Q + (v11 - v10) * fx
    return (top * _Q + (bottom - top) * fy) >> 32


def mock_render(request: RenderRequest) -> bytes:
    """Procedural stand-in for a generative model; returns PNG bytes.

    Palette comes from the weighted category blend, texture from seeded
    value noise, contrast from truncation. Integer arithmetic only.
    """
    res = request.resolution
    dark, light = blend_palette(request.class_weights)
    noise = _noise_field(request)
    trunc_q = round(request.truncation * _Q)
    contrast = 128 + (((noise - 128) * trunc_q) >> 16)  # 0..255
    rgb = np.empty((res, res, 3), dtype=np.uint8)
    for c in range(3):
        rgb[:, :, c] = (dark[c] * 255 + (light[c] - dark[c]) * contrast) // 255
    flat = rgb.reshape(-1)
    fingerprint = hashlib.blake2b(
        request.canonical_string().encode("ascii"), digest_size=_FINGERPRINT_BYTES
    ).digest()
    n = min(len(fingerprint), flat.size)
    flat[:n] = np.frombuffer(fingerprint[:n], dtype=np.uint8)
    return encode_png(rgb)


def _stored_zlib(data: bytes) -> bytes:
    """Zlib stream with stored (uncompressed) deflate blocks, byte-stable."""
    out = bytearray(b"\x78\x01")
    pos = 0
    n = len(data)
    while True:
        block = data[pos : pos + 65535]
        pos += len(block)
        final = 1 if pos >= n else 0
        out.append(final)
        out += struct.pack("<HH", len(block), len(block) ^ 0xFFFF)
        out += block
        if final:
            break
    out += struct.pack(">I", zlib.adler32(data) & 0xFFFFFFFF)
    return bytes(out)


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
    )


def encode_png(rgb: np.ndarray) -> bytes:
    """Minimal RGB8 PNG encoder producing identical bytes everywhere."""
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValidationError("expected uint8 array of shape (h, w, 3)")
    h, w = rgb.shape[0], rgb.shape[1]
    filtered = np.zeros((h, w * 3 + 1), dtype=np.uint8)
    filtered[:, 1:] = rgb.reshape(h, w * 3)
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    idat = _stored_zlib(filtered.tobytes())
    return (
        PNG_SIGNATURE
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", idat)
        + _chunk(b"IEND", b"")
    )


def png_dimensions(data: bytes) -> tuple[int, int]:
    if data[:8] != PNG_SIGNATURE or data[12:16] != b"IHDR":
        raise ValidationError("not a PNG")
    w, h = struct.unpack(">II", data[16:24])
    return w, h


@dataclass
class ImageStore:
    """Content-addressed PNG store; in memory by default, on disk when a
    root directory is given."""

    root: Path | None = None
    _blobs: dict[str, bytes] = field(default_factory=dict)

    def put(self, data: bytes) -> ImageRef:
        digest = hashlib.sha256(data).hexdigest()
        w, h = png_dimensions(data)
        if self.root is not None:
            path = self.root / f"{digest}.png"
            if not path.exists():
                self.root.mkdir(parents=True, exist_ok=True)
                path.write_bytes(data)
        else:
            self._blobs[digest] = data
        return ImageRef(content_digest=digest, uri=f"/images/{digest}.png", width=w, height=h)

    def get(self, digest: str) -> bytes:
        if self.root is not None:
            path = self.root / f"{digest}.png"
            if not path.exists():
                raise KeyError(digest)
            return path.read_bytes()
        return self._blobs[digest]

    def __contains__(self, digest: str) -> bool:
        if self.root is not None:
            return (self.root / f"{digest}.png").exists()
        return digest in self._blobs


class MockBackend:
    """GPU-free deterministic backend used in tests and local runs."""

    def __init__(self, store: ImageStore, max_resolution: int = 1024):
        self.store = store
        self.max_resolution = max_resolution
        self.calls = 0

    def capability(self) -> Capability:
        return Capability(
            model="procedural-mock", max_resolution=self.max_resolution, supports_blend=True
        )

    def render(self, request: RenderRequest) -> ImageRef:
        if request.resolution > self.max_resolution:
            raise RenderRejected(
                f"resolution {request.resolution} exceeds max {self.max_resolution}"
            )
        self.calls += 1
        return self.store.put(mock_render(request))


class HttpBackend:
    """Client for the external render worker (POST /render, GET /healthz)."""

    def __init__(
        self,
        base_url: str,
        store: ImageStore,
        retries: int = 3,
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
        max_resolution: int = 512,
    ):
        if retries < 1:
            raise ValidationError("retries must be >= 1")
        self.store = store
        self.retries = retries
        self.max_resolution = max_resolution
        self._client = httpx.Client(base_url=base_url, timeout=timeout, transport=transport)

    def capability(self) -> Capability:
        try:
            resp = self._client.get("/healthz")
        except httpx.HTTPError as exc:
            raise BackendUnavailable(f"health check failed: {exc}") from exc
        if resp.status_code != 200:
            raise BackendUnavailable(f"health check returned {resp.status_code}")
        model = resp.json().get("model", "unknown")
        return Capability(model=model, max_resolution=self.max_resolution, supports_blend=True)

    def render(self, request: RenderRequest) -> ImageRef:
        last_error = "no attempt made"
        for _ in range(self.retries):
            try:
                resp = self._client.post("/render", json=request.wire_payload())
            except httpx.HTTPError as exc:
                last_error = str(exc)
                continue
            if resp.status_code == 200:
                return self.store.put(resp.content)
            if resp.status_code == 422:
                try:
                    reason = resp.json().get("error", "rejected")
                except ValueError:
                    reason = "rejected"
                raise RenderRejected(reason)
            last_error = f"status {resp.status_code}"
        raise BackendUnavailable(f"render failed after {self.retries} attempts: {last_error}")

    def close(self):
        self._client.close()


class RenderCache:
    """Single-flight cache of ImageRefs keyed by canonical genome id."""

    def __init__(self):
        self.refs: dict[str, ImageRef] = {}
        self._master = threading.Lock()
        self._inflight: dict[str, threading.Event] = {}

    def get(self, key: str) -> ImageRef | None:
        with self._master:
            return self.refs.get(key)


def render_cached(
    cache: RenderCache,
    backend: GeneratorBackend,
    genome: Genome,
    resolution: int = DEFAULT_RESOLUTION,
    ganimal_id: GanimalId | None = None,
) -> ImageRef:
    """Render once per canonical genome; concurrent callers for the same
    genome coalesce onto a single backend call."""
    key = (ganimal_id or canonical_id(genome)).digest
    while True:
        with cache._master:
            ref = cache.refs.get(key)
            if ref is not None:
                return ref
            event = cache._inflight.get(key)
            if event is None:
                event = threading.Event()
                cache._inflight[key] = event
                is_owner = True
            else:
                is_owner = False
        if is_owner:
            try:
                ref = backend.render(RenderRequest.from_genome(genome, resolution))
                with cache._master:
                    cache.refs[key] = ref
                return ref
            finally:
                with cache._master:
                    del cache._inflight[key]
                    event.set()
        else:
            event.wait()

"""Class-conditional generator with blendable class embeddings.

The model follows the BigGAN recipe at toy scale: every category owns an
embedding vector, the generator is conditioned on an embedding (not a
category id), and the latent vector is a truncated normal sample. Because
conditioning is a vector, a weighted sum of embeddings renders a hybrid
and a one-hot blend is exactly the plain class-conditional sample.

Weights are derived deterministically from the model name, so a given
(name, request) pair renders the same bytes for the life of a process.
Cross-version byte equality is not promised.
"""

from __future__ import annotations

import hashlib
import io
import threading

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image

DEFAULT_MODEL = "tiny-biggan-396"
N_CLASSES = 398  # ImageNet animal subtree indices 0..397
LATENT_DIM = 120
EMBED_DIM = 128
_CHANNELS = 64
_BASE = 4  # spatial size of the first feature map
_CLAMP = 2.0  # truncated-normal cutoff before truncation scaling


class RequestError(ValueError):
    """Raised for requests the protocol defines as 422."""


def _seeded_generator(*parts) -> torch.Generator:
    text = "|".join(str(p) for p in parts)
    seed = int.from_bytes(
        hashlib.blake2b(text.encode("ascii"), digest_size=8).digest(), "big"
    )
    g = torch.Generator()
    g.manual_seed(seed)
    return g


class WorkerModel:
    """Single generator instance; renders are serialized on a lock."""

    def __init__(self, name: str = DEFAULT_MODEL, native_resolution: int = 64,
                 max_resolution: int = 512):
        if native_resolution < _BASE or native_resolution & (native_resolution - 1):
            raise ValueError("native_resolution must be a power of two >= 4")
        self.name = name
        self.native_resolution = native_resolution
        self.max_resolution = max_resolution
        self.n_classes = N_CLASSES
        self.latent_dim = LATENT_DIM
        self.embed_dim = EMBED_DIM
        self._lock = threading.Lock()
        g = _seeded_generator("gan-worker-v1", name, native_resolution)

        def param(*shape, scale):
            return torch.randn(*shape, generator=g) * scale

        self.embeddings = param(N_CLASSES, EMBED_DIM, scale=0.5)
        in_dim = LATENT_DIM + EMBED_DIM
        self._fc_w = param(_CHANNELS * _BASE * _BASE, in_dim, scale=in_dim ** -0.5)
        self._fc_b = torch.zeros(_CHANNELS * _BASE * _BASE)
        n_blocks = (native_resolution // _BASE).bit_length() - 1
        fan = (_CHANNELS * 9) ** -0.5
        self._convs = [
            (param(_CHANNELS, _CHANNELS, 3, 3, scale=fan), torch.zeros(_CHANNELS))
            for _ in range(n_blocks)
        ]
        self._cond = [
            (param(_CHANNELS, EMBED_DIM, scale=EMBED_DIM ** -0.5), torch.zeros(_CHANNELS))
            for _ in range(n_blocks)
        ]
        self._out_w = param(3, _CHANNELS, 3, 3, scale=fan)
        self._out_b = torch.zeros(3)

    def class_embedding(self, class_id: int) -> torch.Tensor:
        if not (0 <= class_id < self.n_classes):
            raise RequestError(f"unknown class id {class_id}")
        return self.embeddings[class_id]

    def blend_embedding(self, class_weights) -> torch.Tensor:
        """Conditioning vector for a weighted category mixture."""
        e = torch.zeros(self.embed_dim)
        for class_id, weight in class_weights:
            e += float(weight) * self.class_embedding(class_id)
        return e

    def latent(self, noise_seed: int, truncation: float) -> torch.Tensor:
        """Truncated latent sample, pinned to the noise seed."""
        g = torch.Generator()
        g.manual_seed(noise_seed)
        z = torch.randn(self.latent_dim, generator=g)
        return z.clamp(-_CLAMP, _CLAMP) * truncation

    def _forward(self, z: torch.Tensor, e: torch.Tensor) -> torch.Tensor:
        h = F.linear(torch.cat([z, e]), self._fc_w, self._fc_b)
        h = h.view(1, _CHANNELS, _BASE, _BASE)
        for (cw, cb), (gw, gb) in zip(self._convs, self._cond):
            h = F.interpolate(h, scale_factor=2, mode="nearest")
            h = F.conv2d(h, cw, cb, padding=1)
            gain = F.linear(e, gw, gb).view(1, -1, 1, 1)
            h = F.leaky_relu(h + gain, 0.2)
        return torch.tanh(F.conv2d(h, self._out_w, self._out_b, padding=1))

    def generate(self, conditioning: torch.Tensor, noise_seed: int,
                 truncation: float, resolution: int) -> bytes:
        """Render PNG bytes for an embedding-space conditioning vector."""
        with self._lock, torch.no_grad():
            z = self.latent(noise_seed, truncation)
            img = self._forward(z, conditioning)[0]
        arr = ((img.permute(1, 2, 0) + 1.0) * 127.5).round().clamp(0, 255)
        pixels = arr.to(torch.uint8).numpy()
        image = Image.fromarray(pixels, "RGB")
        if resolution != self.native_resolution:
            image = image.resize((resolution, resolution), Image.BILINEAR)
        buf = io.BytesIO()
        image.save(buf, format="PNG")
        return buf.getvalue()

    def class_conditional(self, class_id: int, noise_seed: int,
                          truncation: float, resolution: int) -> bytes:
        """Ordinary single-category sample; the degenerate blend."""
        return self.generate(self.class_embedding(class_id), noise_seed,
                             truncation, resolution)

    def render(self, request: dict) -> bytes:
        """Validate a wire-protocol request and render it."""
        class_weights, truncation, noise_seed, resolution = parse_request(
            request, self.max_resolution
        )
        return self.generate(self.blend_embedding(class_weights), noise_seed,
                             truncation, resolution)


def parse_request(body, max_resolution: int):
    """Decode and check one /render body; raises RequestError on anything
    the protocol rejects with 422."""
    if not isinstance(body, dict):
        raise RequestError("body must be a JSON object")
    raw = body.get("class_weights")
    if not isinstance(raw, list) or not raw:
        raise RequestError("class_weights must be a non-empty list")
    class_weights = []
    seen = set()
    for entry in raw:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise RequestError("class_weights entries must be [id, weight] pairs")
        class_id, weight_text = entry
        if not isinstance(class_id, int) or isinstance(class_id, bool):
            raise RequestError("class id must be an integer")
        if not (0 <= class_id < N_CLASSES):
            raise RequestError(f"unknown class id {class_id}")
        if class_id in seen:
            raise RequestError(f"duplicate class id {class_id}")
        seen.add(class_id)
        try:
            weight = float(weight_text)
        except (TypeError, ValueError):
            raise RequestError(f"unparseable weight {weight_text!r}")
        if not np.isfinite(weight) or weight <= 0.0:
            raise RequestError(f"non-positive weight for class {class_id}")
        class_weights.append((class_id, weight))
    total = sum(w for _, w in class_weights)
    if abs(total - 1.0) > 1e-9:
        raise RequestError(f"weights sum to {total!r}, expected 1")
    try:
        truncation = float(body.get("truncation"))
    except (TypeError, ValueError):
        raise RequestError("unparseable truncation")
    if not (0.0 < truncation <= 1.0):
        raise RequestError(f"truncation {truncation!r} outside (0, 1]")
    noise_seed = body.get("noise_seed")
    if not isinstance(noise_seed, int) or isinstance(noise_seed, bool):
        raise RequestError("noise_seed must be an integer")
    if not (0 <= noise_seed < 2 ** 64):
        raise RequestError("noise_seed must fit in u64")
    resolution = body.get("resolution")
    if not isinstance(resolution, int) or isinstance(resolution, bool):
        raise RequestError("resolution must be an integer")
    if not (1 <= resolution <= max_resolution):
        raise RequestError(f"resolution {resolution} outside 1..{max_resolution}")
    return class_weights, truncation, noise_seed, resolution

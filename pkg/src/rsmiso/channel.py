"""Channel generation, random-vector-quantized CSIT and precoder construction.

Channel vectors are plain complex ndarrays whose last axis has length M.
Every function broadcasts over leading axes, so a single call can process a
whole Monte Carlo block. Randomness always comes from an explicit
``numpy.random.Generator``; :func:`substream` derives independent generators
from a master seed plus an integer label path, so results never depend on
scheduling or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateGeometryError",
    "CsitReport",
    "substream",
    "sample_channel",
    "sample_isotropic_unit",
    "sample_unit_in_nullspace",
    "quantize_rvq",
    "zf_pseudoinverse_precoders",
    "dominant_right_singular",
    "fix_phase",
]

QUANTIZER_MODES = ("explicit", "statistical")

_NORM_EPS = 1e-12
# complex entries per temporary codebook slab (~32 MB); memory stays
# constant in the bit budget because codewords are streamed in chunks
_SLAB_BUDGET = 1 << 21


class DegenerateGeometryError(ValueError):
    """Raised when a precoder construction meets (near-)collinear inputs."""


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator derived from a master seed and an integer label path."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(key)))


# ---------------------------------------------------------------------------
# vector helpers
# ---------------------------------------------------------------------------

def _inner(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """u^H v along the last axis."""
    return np.sum(np.conj(u) * v, axis=-1)


def _norm(v: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(v) ** 2, axis=-1))


def _unit(v: np.ndarray) -> np.ndarray:
    return v / _norm(v)[..., None]


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate each vector so its first non-negligible entry is real-positive."""
    v = np.asarray(v)
    mag = np.abs(v)
    idx = np.argmax(mag > _NORM_EPS, axis=-1)
    lead = np.take_along_axis(v, idx[..., None], axis=-1)[..., 0]
    lead_mag = np.abs(lead)
    safe = np.where(lead_mag > 0.0, lead_mag, 1.0)
    rot = np.where(lead_mag > 0.0, np.conj(lead) / safe, 1.0)
    return v * rot[..., None]


def _gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------

def sample_channel(M: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw a channel vector with i.i.d. CN(0, 1) entries, shape (M,) or (size, M)."""
    if M < 2:
        raise ValueError("need at least two transmit antennas")
    shape = (M,) if size is None else (int(size), M)
    return _gaussian(shape, rng) / np.sqrt(2.0)


def sample_isotropic_unit(M: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform draw on the complex unit sphere (normalized Gaussian)."""
    if M < 2:
        raise ValueError("need at least two dimensions")
    shape = (M,) if size is None else (int(size), M)
    g = _gaussian(shape, rng)
    n = _norm(g)
    while np.any(n < _NORM_EPS):  # pragma: no cover - probability ~0
        bad = n < _NORM_EPS
        g[bad] = _gaussian(g[bad].shape, rng)
        n = _norm(g)
    return g / n[..., None]


def sample_unit_in_nullspace(v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Isotropic unit vector in the orthogonal complement of each unit vector v.

    Gaussian draw, project out v, normalize; degenerate projections are
    resampled internally.
    """
    v = np.asarray(v)
    g = _gaussian(v.shape, rng)
    g = g - v * _inner(v, g)[..., None]
    n = _norm(g)
    while np.any(n < _NORM_EPS):  # pragma: no cover - probability ~0
        bad = n < _NORM_EPS
        fresh = _gaussian(v[bad].shape, rng)
        fresh = fresh - v[bad] * _inner(v[bad], fresh)[..., None]
        g[bad] = fresh
        n = _norm(g)
    return g / n[..., None]


# ---------------------------------------------------------------------------
# RVQ quantizer
# ---------------------------------------------------------------------------

@dataclass
class CsitReport:
    """Quantized CSIT: unit direction, bit budget and realized sin^2 error."""

    direction: np.ndarray
    bits: float
    sin2_error: np.ndarray | float


def _quantize_explicit(hbar: np.ndarray, bits: int, rng: np.random.Generator):
    """argmin of sin^2 over a streamed codebook of 2^bits isotropic codewords.

    Codewords are generated slab by slab and never stored, so memory is
    independent of the bit budget; ties resolve to the first-seen index.
    """
    M = hbar.shape[-1]
    ncw = 1 << bits
    flat = hbar.reshape(-1, M)
    n = flat.shape[0]
    cw_chunk = min(ncw, max(1, _SLAB_BUDGET // (max(n, 1) * M)))
    if cw_chunk < 64 and ncw >= 64:
        cw_chunk = 64  # keep chunks efficient; slab rows shrink instead
    rows = max(1, _SLAB_BUDGET // (cw_chunk * M))
    best_cos2 = np.empty(n)
    best_dir = np.empty((n, M), dtype=complex)
    for r0 in range(0, n, rows):
        r1 = min(n, r0 + rows)
        hb = flat[r0:r1]
        chunk_best = np.full(r1 - r0, -1.0)
        chunk_dir = np.empty((r1 - r0, M), dtype=complex)
        done = 0
        while done < ncw:
            c = min(cw_chunk, ncw - done)
            cb = _gaussian((r1 - r0, c, M), rng)
            cb /= _norm(cb)[..., None]
            cos2 = np.abs(np.einsum("nm,ncm->nc", np.conj(hb), cb)) ** 2
            idx = np.argmax(cos2, axis=1)
            val = np.take_along_axis(cos2, idx[:, None], axis=1)[:, 0]
            better = val > chunk_best
            chunk_best = np.where(better, val, chunk_best)
            picked = np.take_along_axis(cb, idx[:, None, None], axis=1)[:, 0, :]
            chunk_dir = np.where(better[:, None], picked, chunk_dir)
            done += c
        best_cos2[r0:r1] = chunk_best
        best_dir[r0:r1] = chunk_dir
    sin2 = 1.0 - best_cos2
    return best_dir.reshape(hbar.shape), sin2.reshape(hbar.shape[:-1])


def _quantize_statistical(hbar: np.ndarray, bits: float, rng: np.random.Generator):
    """Statistically equivalent sampler for the RVQ error and direction.

    The per-codeword error has CDF z^(M-1) on [0, 1]; the minimum over 2^bits
    draws therefore has the closed inverse CDF
    z = (1 - (1-u)^(2^-bits))^(1/(M-1)), sampled here without materializing
    any codebook. The direction tilts the true one by the sampled angle
    toward an isotropic vector in its orthogonal complement.
    """
    M = hbar.shape[-1]
    u = rng.random(hbar.shape[:-1])
    scale = 2.0 ** (-bits)
    # stable 1 - (1-u)^scale for tiny scale
    z = (-np.expm1(scale * np.log1p(-u))) ** (1.0 / (M - 1))
    e = sample_unit_in_nullspace(hbar, rng)
    d = np.sqrt(1.0 - z)[..., None] * hbar + np.sqrt(z)[..., None] * e
    return d, z


def quantize_rvq(h: np.ndarray, bits: float, mode: str, rng: np.random.Generator) -> CsitReport:
    """Quantize the direction of h with a 2^bits random vector codebook.

    mode "explicit" streams a real codebook (integer bits required); mode
    "statistical" draws the same error law through its inverse CDF. Both
    return a unit direction whose sin^2 angle to h equals ``sin2_error``.
    """
    if mode not in QUANTIZER_MODES:
        raise ValueError(f"unknown quantizer mode {mode!r}")
    if bits < 0:
        raise ValueError("bit budget must be non-negative")
    h = np.asarray(h, dtype=complex)
    hn = _norm(h)
    if np.any(hn < _NORM_EPS):
        raise ValueError("cannot quantize a zero channel vector")
    hbar = h / hn[..., None]
    if mode == "explicit":
        if bits != int(bits):
            raise ValueError("explicit codebooks need an integer bit budget")
        direction, _ = _quantize_explicit(hbar, int(bits), rng)
    else:
        direction, _ = _quantize_statistical(hbar, float(bits), rng)
    direction = fix_phase(direction)
    sin2 = 1.0 - np.abs(_inner(hbar, direction)) ** 2
    sin2 = np.clip(sin2, 0.0, 1.0)
    if h.ndim == 1:
        return CsitReport(direction=direction, bits=float(bits), sin2_error=float(sin2))
    return CsitReport(direction=direction, bits=float(bits), sin2_error=sin2)


def rvq_error_samples(M: int, bits: float, n: int, mode: str, rng: np.random.Generator) -> np.ndarray:
    """n independent realizations of the RVQ quantization error sin^2 angle.

    Convenience sampler for distribution checks; each realization uses a
    fresh channel and (in explicit mode) a fresh streamed codebook.
    """
    h = sample_channel(M, rng, size=n)
    return np.asarray(quantize_rvq(h, bits, mode, rng).sin2_error)


# ---------------------------------------------------------------------------
# comparison precoders (pseudo-inverse ZF and dominant right-singular vector)
# ---------------------------------------------------------------------------

def zf_pseudoinverse_precoders(h1_hat: np.ndarray, h2_hat: np.ndarray):
    """Normalized columns of the pseudo-inverse of the stacked 2 x M matrix.

    Closed form through the 2x2 Gram matrix of the unit directions: the
    column for user k is the component of h_k_hat orthogonal to the other
    direction, so h_j_hat^H w_k = 0 for j != k.
    """
    h1_hat = np.asarray(h1_hat, dtype=complex)
    h2_hat = np.asarray(h2_hat, dtype=complex)
    if h1_hat.shape != h2_hat.shape:
        raise ValueError("direction shapes must match")
    g = _inner(h1_hat, h2_hat)
    if np.any(np.abs(g) > 1.0 - 1e-10):
        raise DegenerateGeometryError("quantized directions are (near-)collinear")
    p1 = h1_hat - np.conj(g)[..., None] * h2_hat
    p2 = h2_hat - g[..., None] * h1_hat
    return fix_phase(_unit(p1)), fix_phase(_unit(p2))


def dominant_right_singular(h1_hat: np.ndarray, h2_hat: np.ndarray) -> np.ndarray:
    """Top right-singular vector of the stacked 2 x M matrix [h1_hat, h2_hat]^H.

    Analytic eigen-decomposition of the 2x2 Gram matrix, back-mapped to M
    dimensions; exact singular-value ties resolve to the first row's side.
    """
    h1_hat = np.asarray(h1_hat, dtype=complex)
    h2_hat = np.asarray(h2_hat, dtype=complex)
    if h1_hat.shape != h2_hat.shape:
        raise ValueError("direction shapes must match")
    a = np.sum(np.abs(h1_hat) ** 2, axis=-1)
    c = np.sum(np.abs(h2_hat) ** 2, axis=-1)
    if np.any(a + c < _NORM_EPS):
        raise ValueError("both inputs are zero")
    b = _inner(h1_hat, h2_hat)
    half_gap = 0.5 * (a - c)
    disc = np.sqrt(half_gap ** 2 + np.abs(b) ** 2)
    lam_top = 0.5 * (a + c) + disc
    u0 = b.astype(complex)
    u1 = (lam_top - a).astype(complex)
    nrm = np.sqrt(np.abs(u0) ** 2 + np.abs(u1) ** 2)
    tiny = nrm < 1e-14 * np.maximum(lam_top, 1e-300)
    # eigenvector collapses only when b ~ 0 and a >= c: the top side is row 1
    u0 = np.where(tiny, 1.0 + 0.0j, u0)
    u1 = np.where(tiny, 0.0 + 0.0j, u1)
    v = u0[..., None] * h1_hat + u1[..., None] * h2_hat
    return fix_phase(_unit(v))

"""Reproducible Rayleigh fading draws on counter-based substreams.

Every sample is a pure function of (seed, stream, draw index): there is no
generator state to advance, so results are bit-identical regardless of call
order, blocking, or worker count. Channel power |h|^2 under Rayleigh fading
is exponential with mean ``mean_gain``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

_U64 = np.uint64
_GAMMA = _U64(0x9E3779B97F4A7C15)  # golden-ratio increment (SplitMix64 stream step)
_MIX_A = _U64(0xBF58476D1CE4E5B9)
_MIX_B = _U64(0x94D049BB133111EB)
# Domain tags keep the single-draw and link-matrix stream families disjoint.
_DOM_SINGLE = _U64(0xD1B54A32D192ED03)
_DOM_LINKS = _U64(0x8BB84B93962EACC9)

_INV_2_53 = 2.0 ** -53


def _mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer: a bijective avalanche permutation of uint64."""
    z = (z ^ (z >> _U64(30))) * _MIX_A
    z = (z ^ (z >> _U64(27))) * _MIX_B
    return z ^ (z >> _U64(31))


def _uniform_grid(base: np.uint64, streams: np.ndarray, draws: np.ndarray) -> np.ndarray:
    """Uniforms in [0, 1) of shape (len(streams), len(draws)).

    Element (s, d) depends only on (base, streams[s], draws[d]); uint64
    arithmetic wraps mod 2^64 by construction.
    """
    with np.errstate(over="ignore"):
        key = _mix64(base + streams * _GAMMA)
        z = _mix64(key[:, None] + (draws + _U64(1)) * _GAMMA)
    return (z >> _U64(11)) * _INV_2_53


def _exponential_grid(base, streams, draws, mean) -> np.ndarray:
    u = _uniform_grid(base, streams, draws)
    np.negative(u, out=u)
    np.log1p(u, out=u)
    u *= -1.0
    u *= mean
    return u


def _as_stream_ids(ids) -> np.ndarray:
    arr = np.asarray(ids)
    if arr.ndim > 1:
        raise ValueError("stream ids must be scalar or 1-D")
    if np.any(arr < 0):
        raise ValueError("stream ids must be non-negative")
    return arr.astype(np.uint64).reshape(-1)


@dataclass(frozen=True)
class FadingConfig:
    """Rayleigh block-fading model: |h|^2 ~ exponential(mean_gain)."""

    mean_gain: float = 1.0
    seed: int = 0
    model: str = "rayleigh"

    def __post_init__(self):
        if self.model != "rayleigh":
            raise ValueError(f"unsupported fading model: {self.model!r}")
        if not (np.isfinite(self.mean_gain) and self.mean_gain > 0):
            raise ValueError("mean_gain must be finite and > 0")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class TopologyConfig:
    """Transmitter/user counts plus per-link mean-gain scaling.

    ``cross_gain_scale`` multiplies the fading mean per (transmitter, user)
    link and models path loss / geometry. Scalars broadcast to all links.
    """

    num_transmitters: int
    num_users: int
    cross_gain_scale: np.ndarray | float = 1.0

    def __post_init__(self):
        if self.num_transmitters < 1 or self.num_users < 1:
            raise ValueError("num_transmitters and num_users must be >= 1")
        scale = np.broadcast_to(
            np.asarray(self.cross_gain_scale, dtype=np.float64),
            (self.num_transmitters, self.num_users),
        ).copy()
        if not np.all(np.isfinite(scale)) or np.any(scale < 0):
            raise ValueError("cross_gain_scale entries must be finite and >= 0")
        object.__setattr__(self, "cross_gain_scale", scale)


class LinkGain(NamedTuple):
    """One transmitter-to-receiver channel power sample and its normalized SNR."""

    gain_sq: float
    gamma: float


@dataclass(frozen=True)
class LinkGains:
    """Gain matrix for one fading realization, entry (k, i) = link TX k -> user i."""

    gain_sq: np.ndarray
    gamma: np.ndarray

    def at(self, tx: int, user: int) -> LinkGain:
        return LinkGain(float(self.gain_sq[tx, user]), float(self.gamma[tx, user]))


def draw_fading(cfg: FadingConfig, stream_id: int) -> float:
    """One exponential |h|^2 sample with mean cfg.mean_gain.

    The same (cfg.seed, stream_id) pair always yields the same value.
    """
    return float(draw_fading_block(cfg, [stream_id])[0])


def draw_fading_block(cfg: FadingConfig, stream_ids) -> np.ndarray:
    """Vectorized draw_fading: one sample per stream id."""
    streams = _as_stream_ids(stream_ids)
    base = _U64(cfg.seed) ^ _DOM_SINGLE
    g = _exponential_grid(base, streams, np.zeros(1, dtype=np.uint64), cfg.mean_gain)
    return g.reshape(-1)


def realize_links_block(topo: TopologyConfig, cfg: FadingConfig, trials) -> np.ndarray:
    """Gain tensor of shape (num_trials, K, M) for a batch of trial indices.

    Entry (t, k, i) has mean cfg.mean_gain * cross_gain_scale[k, i] and is a
    pure function of (cfg.seed, trials[t], k, i).
    """
    streams = _as_stream_ids(trials)
    k, m = topo.num_transmitters, topo.num_users
    base = _U64(cfg.seed) ^ _DOM_LINKS
    mean = (cfg.mean_gain * topo.cross_gain_scale).reshape(-1)
    g = _exponential_grid(base, streams, np.arange(k * m, dtype=np.uint64), mean)
    return g.reshape(len(streams), k, m)


def realize_links(
    topo: TopologyConfig,
    cfg: FadingConfig,
    trial: int,
    noise_plus_ici: np.ndarray | float = 1.0,
) -> LinkGains:
    """One fading realization of the whole topology.

    ``noise_plus_ici`` rescales gamma = gain_sq / (I + N); the default 1.0
    matches the normalized-noise convention used throughout.
    """
    gain_sq = realize_links_block(topo, cfg, [trial])[0]
    denom = np.asarray(noise_plus_ici, dtype=np.float64)
    if np.any(denom <= 0):
        raise ValueError("noise_plus_ici must be > 0")
    return LinkGains(gain_sq=gain_sq, gamma=gain_sq / denom)

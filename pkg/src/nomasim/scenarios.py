"""Vectorized fading-trial realizations for each supported deployment.

A scenario knows its topology and power-sharing rule and turns a batch of
trial indices into a (trials, users) matrix of per-user rates at a given
power budget. All randomness flows through the counter-based channel
substreams, so outputs depend only on (seed, trial index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .allocation import geometric_fractions
from .channel import FadingConfig, TopologyConfig, realize_links_block
from .rates import COMBINING_MODES, INI_MODES, noma_rates_ordered


def _sort_desc(gains: np.ndarray) -> np.ndarray:
    return -np.sort(-gains, axis=-1)


def _sic_gate(rates: np.ndarray, gammas: np.ndarray, powers: np.ndarray, delta: float) -> np.ndarray:
    """Zero the rate of any user whose SIC chain misses the sensitivity gap.

    A user decodes levels m..i; the tightest received-power margin over that
    chain must clear delta at the user's own channel. delta == 0 disables
    the gate.
    """
    if delta <= 0.0:
        return rates
    margins = 2.0 * powers - np.cumsum(powers)  # p_j - sum of lower levels
    tightest = np.minimum.accumulate(margins[::-1])[::-1]
    return np.where(gammas * tightest >= delta, rates, 0.0)


@dataclass(frozen=True)
class SisoScenario:
    """Single transmitter, one m-user NOMA cluster on one sub-band."""

    fading: FadingConfig
    cluster_size: int
    power_ratio: float = 2.0
    ini_mode: str = "own_channel"
    sic_delta: float = 0.0
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.ini_mode not in INI_MODES:
            raise ValueError(f"unknown ini_mode: {self.ini_mode!r}")
        object.__setattr__(self, "_fractions", geometric_fractions(self.cluster_size, self.power_ratio))
        object.__setattr__(self, "_topo", TopologyConfig(1, self.cluster_size))

    @property
    def n_users(self) -> int:
        return self.cluster_size

    def rates_block(self, p_t: float, trials: np.ndarray) -> np.ndarray:
        gains = _sort_desc(realize_links_block(self._topo, self.fading, trials)[:, 0, :])
        powers = self._fractions * p_t
        rates = noma_rates_ordered(gains, powers, self.bandwidth, self.ini_mode)
        return _sic_gate(rates, gains, powers, self.sic_delta)


@dataclass(frozen=True)
class MimoScenario:
    """One multi-antenna transmitter; every antenna serves its own cluster.

    The sub-band budget splits evenly across clusters; zero-forcing is
    modeled as an exact null at each cluster's strongest user and a scalar
    ``leakage`` share of the other clusters' power elsewhere.
    """

    fading: FadingConfig
    num_clusters: int
    cluster_size: int
    leakage: float = 0.1
    cross_gain_scale: float = 1.0
    power_ratio: float = 2.0
    ini_mode: str = "own_channel"
    sic_delta: float = 0.0
    bandwidth: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.leakage <= 1.0:
            raise ValueError("leakage must lie in [0, 1]")
        if self.num_clusters < 1:
            raise ValueError("num_clusters must be >= 1")
        a, m = self.num_clusters, self.cluster_size
        scale = np.full((a, a, m), float(self.cross_gain_scale))
        scale[np.arange(a), np.arange(a), :] = 1.0  # serving antenna
        topo = TopologyConfig(a, a * m, scale.reshape(a, a * m))
        object.__setattr__(self, "_topo", topo)
        object.__setattr__(self, "_fractions", geometric_fractions(m, self.power_ratio))

    @property
    def n_users(self) -> int:
        return self.num_clusters * self.cluster_size

    def rates_block(self, p_t: float, trials: np.ndarray) -> np.ndarray:
        a, m = self.num_clusters, self.cluster_size
        g = realize_links_block(self._topo, self.fading, trials).reshape(-1, a, a, m)
        cluster_power = p_t / a
        serving = g[:, np.arange(a), np.arange(a), :]  # (T, cluster, user)
        ici = self.leakage * cluster_power * (g.sum(axis=1) - serving)
        heads = np.argmax(serving, axis=-1)
        np.put_along_axis(ici, heads[..., None], 0.0, axis=-1)
        gammas = _sort_desc(serving / (ici + 1.0))
        powers = self._fractions * cluster_power
        rates = noma_rates_ordered(gammas, powers, self.bandwidth, self.ini_mode)
        return _sic_gate(rates, gammas, powers, self.sic_delta).reshape(-1, a * m)


@dataclass(frozen=True)
class CompScenario:
    """Joint transmission from num_bs base stations: each BS carries its own
    centre cluster plus the shared cell-edge user on the same sub-band.

    Every BS spends the full budget p_t with identical fractions; the edge
    user always takes the largest fraction. Cross-cell links are scaled by
    ``cross_gain_scale``.
    """

    fading: FadingConfig
    num_bs: int
    centre_per_bs: int
    cross_gain_scale: float = 1.0
    power_ratio: float = 2.0
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.num_bs < 1 or self.centre_per_bs < 1:
            raise ValueError("num_bs and centre_per_bs must be >= 1")
        b, m = self.num_bs, self.centre_per_bs
        scale = np.empty((b, 1 + b * m))
        scale[:, 0] = 1.0  # edge user is served by every BS
        centre = np.full((b, b, m), float(self.cross_gain_scale))
        centre[np.arange(b), np.arange(b), :] = 1.0
        scale[:, 1:] = centre.reshape(b, b * m)
        object.__setattr__(self, "_topo", TopologyConfig(b, 1 + b * m, scale))
        object.__setattr__(self, "_fractions", geometric_fractions(m + 1, self.power_ratio))

    @property
    def n_users(self) -> int:
        return 1 + self.num_bs * self.centre_per_bs

    def rates_block(self, p_t: float, trials: np.ndarray) -> np.ndarray:
        b, m = self.num_bs, self.centre_per_bs
        g = realize_links_block(self._topo, self.fading, trials)
        edge_g = g[:, :, 0]
        centre_g = g[:, :, 1:].reshape(-1, b, b, m)  # (T, tx, owner, user)

        powers = self._fractions * p_t
        edge_p, centre_p = powers[-1], powers[:-1]
        centre_sum = centre_p.sum()

        # Centre users are re-ranked per trial by their own-cell gain; their
        # cross-cell draws follow them through the same permutation.
        serving = centre_g[:, np.arange(b), np.arange(b), :]
        order = np.argsort(-serving, axis=-1, kind="stable")
        serving = np.take_along_axis(serving, order, axis=-1)
        crossed = np.take_along_axis(centre_g, order[:, None, :, :], axis=-1)

        total_edge = edge_g.sum(axis=1)
        edge_rate = np.log2(1.0 + edge_p * total_edge / (centre_sum * total_edge + 1.0))

        ici = (crossed.sum(axis=1) - serving) * centre_sum
        stronger = np.cumsum(centre_p) - centre_p
        centre_rates = self.bandwidth * np.log2(
            1.0 + centre_p * serving / (serving * stronger + ici + 1.0)
        )
        out = np.empty((len(trials), self.n_users))
        out[:, 0] = self.bandwidth * edge_rate
        out[:, 1:] = centre_rates.reshape(-1, b * m)
        return out


@dataclass(frozen=True)
class CoopScenario:
    """K cooperating transmitters jointly serving one M-user NOMA cluster.

    ``shared`` budget mode splits p_t evenly over the transmitters so the
    sweep axis stays comparable with single-transmitter scenarios.
    power_sum combining adds branch powers (diversity order K); coherent
    models random-phase joint transmission, leaving the combined channel
    exponential with K times the mean (array gain, diversity order 1).
    """

    fading: FadingConfig
    num_transmitters: int
    cluster_size: int
    combining: str = "power_sum"
    budget_mode: str = "shared"
    power_ratio: float = 2.0
    ini_mode: str = "own_channel"
    sic_delta: float = 0.0
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.combining not in COMBINING_MODES:
            raise ValueError(f"unknown combining mode: {self.combining!r}")
        if self.budget_mode not in ("shared", "per_tx"):
            raise ValueError(f"unknown budget_mode: {self.budget_mode!r}")
        topo = TopologyConfig(self.num_transmitters, self.cluster_size)
        object.__setattr__(self, "_topo", topo)
        object.__setattr__(self, "_fractions", geometric_fractions(self.cluster_size, self.power_ratio))

    @property
    def n_users(self) -> int:
        return self.cluster_size

    def rates_block(self, p_t: float, trials: np.ndarray) -> np.ndarray:
        g = realize_links_block(self._topo, self.fading, trials)
        if self.combining == "power_sum":
            eff = g.sum(axis=1)
        else:
            eff = g[:, 0, :] * float(self.num_transmitters)
        budget = p_t / self.num_transmitters if self.budget_mode == "shared" else p_t
        gammas = _sort_desc(eff)
        powers = self._fractions * budget
        rates = noma_rates_ordered(gammas, powers, self.bandwidth, self.ini_mode)
        return _sic_gate(rates, gammas, powers, self.sic_delta)

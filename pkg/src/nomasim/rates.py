"""Achievable-rate formulas for SISO, MIMO, CoMP and cooperative NOMA.

All operations share one ordering convention: clusters are sorted by channel
magnitude with index 1 the strongest user, and power fractions increase with
index, so user i cancels every level j > i through SIC and sees only levels
j < i as residual interference. Rates are in bit/s (bit/s/Hz at bandwidth 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .allocation import PowerAllocation

INI_MODES = ("own_channel", "literal")
COMBINING_MODES = ("power_sum", "coherent")


@dataclass(frozen=True)
class OrderedCluster:
    """A NOMA cluster after channel ordering (descending normalized SNR).

    ``permutation[original_index] = ordered_index`` maps pre-sort user ids to
    their position; ties are broken by the smaller original index first.
    """

    gammas: np.ndarray
    permutation: np.ndarray
    bandwidth: float = 1.0

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=np.float64)
        if g.ndim != 1 or g.size < 1:
            raise ValueError("gammas must be a non-empty 1-D sequence")
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise ValueError("gammas must be finite and >= 0")
        if np.any(np.diff(g) > 0):
            raise ValueError("gammas must be sorted descending")
        perm = np.asarray(self.permutation, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(g.size)):
            raise ValueError("permutation must be a bijection on the user set")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be > 0")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "permutation", perm)

    @property
    def size(self) -> int:
        return self.gammas.size


def order_by_gain(gammas, bandwidth: float = 1.0) -> OrderedCluster:
    """Sort users by normalized SNR, strongest first, stable on ties."""
    g = np.asarray(gammas, dtype=np.float64)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("gammas must be a non-empty 1-D sequence")
    order = np.argsort(-g, kind="stable")  # order[pos] = original index
    perm = np.empty_like(order)
    perm[order] = np.arange(g.size)
    return OrderedCluster(gammas=g[order], permutation=perm, bandwidth=bandwidth)


def noma_rates_ordered(
    gammas: np.ndarray,
    powers: np.ndarray,
    bandwidth: float = 1.0,
    ini_mode: str = "own_channel",
) -> np.ndarray:
    """Core SIC rate expression over descending-ordered gains (last axis).

    own_channel: R_i = B log2(1 + p_i g_i / (g_i sum_{j<i} p_j + 1))
    literal:     the residual term uses each interferer's own channel,
                 sum_{j<i} p_j g_j, instead of the receiving user's.
    Accepts batched gammas of shape (..., m) with a shared power vector.
    """
    if ini_mode not in INI_MODES:
        raise ValueError(f"unknown ini_mode: {ini_mode!r}")
    p = np.asarray(powers, dtype=np.float64)
    g = np.asarray(gammas, dtype=np.float64)
    if p.ndim != 1 or g.shape[-1] != p.size:
        raise ValueError(f"power vector size {p.size} != cluster size {g.shape[-1]}")
    stronger = np.cumsum(p) - p  # lower-power levels user i cannot cancel
    if ini_mode == "own_channel":
        residual = g * stronger
    else:
        pg = g * p
        residual = np.cumsum(pg, axis=-1) - pg
    return bandwidth * np.log2(1.0 + (p * g) / (residual + 1.0))


def rate_siso_noma(
    cluster: OrderedCluster,
    alloc: PowerAllocation,
    ini_mode: str = "own_channel",
) -> np.ndarray:
    """Per-user downlink NOMA throughput for one ordered cluster."""
    if alloc.size != cluster.size:
        raise ValueError(f"allocation size {alloc.size} != cluster size {cluster.size}")
    return noma_rates_ordered(cluster.gammas, alloc.powers, cluster.bandwidth, ini_mode)


def rate_oma_baseline(cluster: OrderedCluster, budget: float) -> np.ndarray:
    """Orthogonal baseline: each user gets 1/m of the resource at full budget."""
    if not budget > 0:
        raise ValueError("budget must be > 0")
    share = cluster.bandwidth / cluster.size
    return share * np.log2(1.0 + budget * cluster.gammas)


@dataclass(frozen=True)
class CompTopology:
    """Joint-transmission topology: one shared cell-edge user plus per-BS
    cell-centre clusters reusing the same sub-band.

    ``centre_gammas[i]`` lists BS i's own-cell centre users in canonical
    order (strongest first); the edge user is jointly served by every BS and
    always occupies the final (largest-power) slot of each BS's allocation.
    ``cross_gammas[i][m, j]`` is the gain from interfering BS m to centre
    user j of BS i (row m == i is ignored).
    """

    edge_gammas: np.ndarray
    centre_gammas: tuple[np.ndarray, ...]
    cross_gammas: tuple[np.ndarray, ...]

    def __post_init__(self):
        edge = np.asarray(self.edge_gammas, dtype=np.float64)
        if edge.ndim != 1 or edge.size < 1:
            raise ValueError("edge user needs at least one serving link")
        if np.any(edge < 0):
            raise ValueError("gains must be >= 0")
        n_bs = edge.size
        if len(self.centre_gammas) != n_bs or len(self.cross_gammas) != n_bs:
            raise ValueError("per-BS lists must match the number of base stations")
        centres = tuple(np.asarray(c, dtype=np.float64) for c in self.centre_gammas)
        crosses = tuple(np.asarray(x, dtype=np.float64) for x in self.cross_gammas)
        for i, (c, x) in enumerate(zip(centres, crosses)):
            if np.any(c < 0) or np.any(x < 0):
                raise ValueError("gains must be >= 0")
            if x.shape != (n_bs, c.size):
                raise ValueError(f"cross_gammas[{i}] must have shape (num_bs, n_centre)")
        object.__setattr__(self, "edge_gammas", edge)
        object.__setattr__(self, "centre_gammas", centres)
        object.__setattr__(self, "cross_gammas", crosses)

    @property
    def num_bs(self) -> int:
        return self.edge_gammas.size


def _check_comp_allocs(topo: CompTopology, allocs: Sequence[PowerAllocation]) -> None:
    if len(allocs) != topo.num_bs:
        raise ValueError("one PowerAllocation required per base station")
    for i, alloc in enumerate(allocs):
        if alloc.size != topo.centre_gammas[i].size + 1:
            raise ValueError(f"allocation for BS {i} must cover its centre users plus the edge user")


def rate_comp_edge(topo: CompTopology, allocs: Sequence[PowerAllocation]) -> float:
    """Cell-edge throughput under joint transmission from every BS.

    Useful power accumulates across serving BSs while every centre-user
    signal, weighted by the edge user's own channel, remains as residual.
    """
    _check_comp_allocs(topo, allocs)
    useful = 0.0
    residual = 0.0
    for i, alloc in enumerate(allocs):
        p = alloc.powers
        useful += p[-1] * topo.edge_gammas[i]
        residual += p[:-1].sum() * topo.edge_gammas[i]
    return float(np.log2(1.0 + useful / (residual + 1.0)))


def rate_comp_center(
    topo: CompTopology,
    allocs: Sequence[PowerAllocation],
    bs: int,
    user: int,
) -> float:
    """Cell-centre throughput with intra-cell residual plus inter-cluster ICI.

    ``user`` is the canonical position inside BS ``bs``'s centre list
    (0 = strongest). The user cancels the edge signal and every weaker
    centre; stronger centres and the other BSs' centre signals remain.
    """
    _check_comp_allocs(topo, allocs)
    if not 0 <= bs < topo.num_bs:
        raise ValueError(f"bs index {bs} out of range")
    centres = topo.centre_gammas[bs]
    if not 0 <= user < centres.size:
        raise ValueError(f"user index {user} out of range for BS {bs}")
    p = allocs[bs].powers
    gamma = centres[user]
    intra = gamma * p[:user].sum()
    ici = 0.0
    for m, alloc in enumerate(allocs):
        if m == bs:
            continue
        ici += topo.cross_gammas[bs][m, user] * alloc.powers[:-1].sum()
    return float(np.log2(1.0 + p[user] * gamma / (intra + ici + 1.0)))


def rate_comp_all(topo: CompTopology, allocs: Sequence[PowerAllocation]) -> np.ndarray:
    """Every user's rate: edge first, then per-BS centres in canonical order."""
    out = [rate_comp_edge(topo, allocs)]
    for i in range(topo.num_bs):
        for j in range(topo.centre_gammas[i].size):
            out.append(rate_comp_center(topo, allocs, i, j))
    return np.asarray(out)


def zf_residual_ici(
    cross_gains: Sequence[np.ndarray],
    cluster_powers,
    head_indices,
    leakage: float,
) -> list[np.ndarray]:
    """Residual inter-cluster interference after zero-forcing beamforming.

    ``cross_gains[c]`` has shape (num_clusters, m_c): gain from each transmit
    antenna to the users of cluster c. The beam is nulled exactly at each
    cluster's head user; everyone else keeps a ``leakage`` share of the other
    clusters' power.
    """
    if not 0.0 <= leakage <= 1.0:
        raise ValueError("leakage must lie in [0, 1]")
    powers = np.asarray(cluster_powers, dtype=np.float64)
    n_clusters = len(cross_gains)
    if powers.size != n_clusters or len(head_indices) != n_clusters:
        raise ValueError("cluster_powers and head_indices must match the cluster count")
    out = []
    for c, gains in enumerate(cross_gains):
        g = np.asarray(gains, dtype=np.float64)
        if g.shape[0] != n_clusters:
            raise ValueError(f"cross_gains[{c}] must have one row per transmit antenna")
        head = int(head_indices[c])
        if not 0 <= head < g.shape[1]:
            raise ValueError(f"head index {head} out of range for cluster {c}")
        other = np.delete(np.arange(n_clusters), c)
        ici = leakage * (powers[other, None] * g[other]).sum(axis=0)
        ici[head] = 0.0
        out.append(ici)
    return out


def rate_mimo_noma(
    serving_gains: Sequence[np.ndarray],
    residual_ici: Sequence[np.ndarray],
    allocs: Sequence[PowerAllocation],
    bandwidth: float = 1.0,
    ini_mode: str = "own_channel",
) -> list[np.ndarray]:
    """Per-cluster NOMA rates with ZF-residual ICI folded into gamma.

    Each cluster's users keep their input positions in the returned arrays;
    ordering happens internally on gamma = gain / (ICI + 1).
    """
    if not len(serving_gains) == len(residual_ici) == len(allocs):
        raise ValueError("serving_gains, residual_ici and allocs must align")
    out = []
    for gains, ici, alloc in zip(serving_gains, residual_ici, allocs):
        g = np.asarray(gains, dtype=np.float64)
        gamma = g / (np.asarray(ici, dtype=np.float64) + 1.0)
        cluster = order_by_gain(gamma, bandwidth=bandwidth)
        ordered = rate_siso_noma(cluster, alloc, ini_mode)
        out.append(ordered[cluster.permutation])
    return out


@dataclass(frozen=True)
class CoopCluster:
    """One NOMA cluster served jointly by K cooperating transmitters.

    ``gains[k, i]`` is the |h|^2 sample of link k -> user i. ``mean_gains``
    carries the per-link fading means (defaults to all-equal) and is only
    consumed by the coherent combining rule.
    """

    gains: np.ndarray
    mode: str = "power_sum"
    mean_gains: np.ndarray | None = None

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.gains, dtype=np.float64))
        if g.size == 0:
            raise ValueError("cooperative cluster needs at least one serving link per user")
        if np.any(g < 0):
            raise ValueError("gains must be >= 0")
        if self.mode not in COMBINING_MODES:
            raise ValueError(f"unknown combining mode: {self.mode!r}")
        if self.mean_gains is None:
            mean = np.ones_like(g)
        else:
            mean = np.broadcast_to(np.asarray(self.mean_gains, dtype=np.float64), g.shape).copy()
            if np.any(mean <= 0):
                raise ValueError("mean_gains must be > 0")
        object.__setattr__(self, "gains", g)
        object.__setattr__(self, "mean_gains", mean)

    @property
    def num_transmitters(self) -> int:
        return self.gains.shape[0]

    @property
    def num_users(self) -> int:
        return self.gains.shape[1]


def coop_effective_gain(coop: CoopCluster, user: int | None = None):
    """Effective per-user SNR gain of the cooperating transmitter set.

    power_sum combines branch powers (sum over k: diversity order K);
    coherent models random-phase joint transmission: the combined channel
    stays exponential with the summed mean, realized by rescaling the first
    branch by the mean ratio (array gain only, diversity order 1).
    """
    if coop.mode == "power_sum":
        eff = coop.gains.sum(axis=0)
    else:
        scale = coop.mean_gains.sum(axis=0) / coop.mean_gains[0]
        eff = coop.gains[0] * scale
    if user is None:
        return eff
    if not 0 <= user < coop.num_users:
        raise ValueError(f"user index {user} out of range")
    return float(eff[user])


def rate_coop_noma(
    coop: CoopCluster,
    alloc: PowerAllocation,
    budget_mode: str = "shared",
    bandwidth: float = 1.0,
) -> np.ndarray:
    """NOMA rates for one cooperatively served cluster, canonical order.

    ``shared`` splits the sub-band budget evenly over the K transmitters so
    power sweeps stay comparable with the single-transmitter case; ``per_tx``
    lets every transmitter radiate the full budget instead.
    """
    if alloc.size != coop.num_users:
        raise ValueError(f"allocation size {alloc.size} != cluster size {coop.num_users}")
    if budget_mode not in ("shared", "per_tx"):
        raise ValueError(f"unknown budget_mode: {budget_mode!r}")
    budget = alloc.budget / coop.num_transmitters if budget_mode == "shared" else alloc.budget
    cluster = order_by_gain(coop_effective_gain(coop), bandwidth=bandwidth)
    return rate_siso_noma(cluster, alloc.scaled(budget))

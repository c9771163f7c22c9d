"""Exact Markov-chain analysis of the Type-2 solver dynamics.

The solver's proposal law (uniform single-spin flip, pairwise consistency
signs iid with probability p_chem, accept when the observed change is
<= 0) defines a discrete-time chain over all 2^N spin configurations.
Acceptance probabilities are computed exactly by enumerating the sign
patterns; success is finite-horizon absorption mass on the global minima.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .qubo import (
    CapacityError,
    QuboProblem,
    bits_to_spins,
    config_index,
    flip_terms,
    index_config,
    qubo_to_ising,
)

_ENUM_CAP = 23  # subset-sum enumeration over nonzero pairwise terms
_DENSE_CAP = 14  # dense 2^N x 2^N transition matrices


def acceptance_prob(p: QuboProblem, x, h: int, p_chem: float) -> float:
    """Exact probability that the Type-2 check accepts flipping variable h.

    P[ lin + sum_i sigma_i d_i <= 0 ] where the d_i are the true pairwise
    terms of the flip, sigma_i = +1 with probability p_chem else -1, and
    the linear self-term enters unflipped. Enumerates all sign patterns
    over the nonzero terms.
    """
    if not 0.0 <= p_chem <= 1.0:
        raise ValueError("p_chem must be in [0, 1]")
    x = np.asarray(x, dtype=np.uint8)
    ising = qubo_to_ising(p)
    s = bits_to_spins(x).astype(float)
    lin, pair = flip_terms(ising, s, h)
    d = pair[np.flatnonzero(ising.coupling[h])]
    true_de = lin + d.sum()
    if p_chem == 1.0:
        return 1.0 if true_de <= 0.0 else 0.0
    if d.size > _ENUM_CAP:
        raise CapacityError(f"enumeration capped at {_ENUM_CAP} pairwise terms, got {d.size}")
    sums = np.zeros(1)
    probs = np.ones(1)
    for di in d:
        sums = np.concatenate([sums + di, sums - di])
        probs = np.concatenate([probs * p_chem, probs * (1.0 - p_chem)])
    return float(probs[lin + sums <= 0.0].sum())


@dataclass
class TransitionMatrix:
    """Row-stochastic matrix over all 2^n configs; index bit i is x_i."""

    matrix: np.ndarray
    n: int
    p_chem: float


def build_transition_matrix(p: QuboProblem, p_chem: float) -> TransitionMatrix:
    """Dense one-proposal transition matrix of the Type-2 chain.

    Entry (c, c xor 2^h) is acceptance_prob(c, h) / n; the diagonal absorbs
    the rejected mass. Only Hamming-distance-1 transitions are nonzero.
    """
    if p.n > _DENSE_CAP:
        raise CapacityError(f"dense transition matrix capped at {_DENSE_CAP} variables")
    size = 1 << p.n
    t = np.zeros((size, size))
    for c in range(size):
        x = index_config(c, p.n)
        for h in range(p.n):
            t[c, c ^ (1 << h)] = acceptance_prob(p, x, h, p_chem) / p.n
        t[c, c] = 1.0 - t[c].sum()
    return TransitionMatrix(t, p.n, p_chem)


@dataclass
class SuccessReport:
    """Per-initial-config probability of reaching a global minimum."""

    success: np.ndarray
    minima: list[int]
    p_chem: float
    horizon: int

    @property
    def min(self) -> float:
        return float(self.success.min())

    @property
    def max(self) -> float:
        return float(self.success.max())

    @property
    def mean(self) -> float:
        return float(self.success.mean())

    def spread(self, exclude_minima: bool = True) -> float:
        """max - min of success, by default over the non-minimum configs."""
        vals = self.success
        if exclude_minima:
            mask = np.ones(vals.shape[0], bool)
            mask[self.minima] = False
            vals = vals[mask]
        return float(vals.max() - vals.min())

    def histogram(self, bins: int = 20):
        return np.histogram(self.success, bins=bins, range=(0.0, 1.0))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["config", "success"])
            for c, v in enumerate(self.success):
                writer.writerow([c, f"{v:.12g}"])

    def write_json(self, path, bins: int = 20):
        hist, edges = self.histogram(bins)
        payload = {
            "p_chem": self.p_chem,
            "horizon": self.horizon,
            "minima": self.minima,
            "min": self.min,
            "max": self.max,
            "mean": self.mean,
            "spread_nonminima": self.spread(),
            "histogram": {"counts": hist.tolist(), "edges": edges.tolist()},
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def success_probabilities(
    t: TransitionMatrix, minima, horizon: int | None = None
) -> SuccessReport:
    """Absorption mass on the minima within `horizon` proposals.

    Minima rows are made absorbing; success of config c is the probability
    mass row c of T_abs^horizon places on the minima. Default horizon is
    100 * n proposals.
    """
    minima = sorted(int(m) for m in minima)
    if not minima:
        raise ValueError("minima set must be nonempty")
    if horizon is None:
        horizon = 100 * t.n
    t_abs = t.matrix.copy()
    for m in minima:
        t_abs[m] = 0.0
        t_abs[m, m] = 1.0
    power = np.linalg.matrix_power(t_abs, horizon)
    success = power[:, minima].sum(axis=1)
    return SuccessReport(success, minima, t.p_chem, horizon)


def trajectory_raster(
    p: QuboProblem,
    p_chem: float,
    init,
    steps: int,
    rng: np.random.Generator,
) -> list[int]:
    """One sampled Type-2 trajectory as config indices (init included)."""
    x = np.asarray(init, dtype=np.uint8).copy()
    if x.shape != (p.n,):
        raise ValueError("initial config length mismatch")
    ising = qubo_to_ising(p)
    partners = [np.flatnonzero(ising.coupling[h]) for h in range(p.n)]
    s = bits_to_spins(x).astype(float)
    path = [config_index(x)]
    for _ in range(steps):
        h = int(rng.integers(p.n))
        lin, pair = flip_terms(ising, s, h)
        terms = pair[partners[h]]
        if p_chem >= 1.0:
            obs = lin + terms.sum()
        else:
            signs = np.where(rng.random(terms.shape[0]) < p_chem, 1.0, -1.0)
            obs = lin + (signs * terms).sum()
        if obs <= 0.0:
            x[h] ^= 1
            s[h] = -s[h]
        path.append(config_index(x))
    return path


def empirical_success(
    p: QuboProblem,
    p_chem: float,
    init_index: int,
    horizon: int,
    runs: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo estimate of the success probability for one start.

    Runs the Type-2 proposal law vectorized across `runs` independent
    chains for `horizon` proposals; a chain succeeds when it visits any
    global-minimum config. The per-chain law is exactly the solver's.
    """
    from .qubo import brute_force_min

    emin, configs = brute_force_min(p)
    minima = np.array(sorted(config_index(c) for c in configs), dtype=np.int64)
    n = p.n
    ising = qubo_to_ising(p)
    coupling = ising.coupling
    g = ising.g
    pow2 = (1 << np.arange(n)).astype(np.int64)

    x = np.tile(index_config(init_index, n), (runs, 1)).astype(np.int8)
    s = (2 * x - 1).astype(np.float64)
    hit = np.isin(np.full(runs, init_index, dtype=np.int64), minima)
    rows = np.arange(runs)
    for _ in range(horizon):
        if hit.all():
            break
        h = rng.integers(n, size=runs)
        delta = -2.0 * s[rows, h]
        pair = delta[:, None] * coupling[h] * s
        lin = delta * g[h]
        if p_chem >= 1.0:
            obs = lin + pair.sum(axis=1)
        else:
            signs = np.where(rng.random((runs, n)) < p_chem, 1.0, -1.0)
            obs = lin + (signs * pair).sum(axis=1)
        accept = obs <= 0.0
        flip_rows = rows[accept]
        flip_cols = h[accept]
        x[flip_rows, flip_cols] ^= 1
        s[flip_rows, flip_cols] = -s[flip_rows, flip_cols]
        idx = (x.astype(np.int64) * pow2).sum(axis=1)
        hit |= np.isin(idx, minima)
    return float(hit.mean())

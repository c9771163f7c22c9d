"""Probabilistic chemical state machine: P(next chemical state is high).

Phenomenological models for three settings: a 1D chain driven by binary
cell/interfacial stirrer bits, a 2D torus driven by four-level PWM classes
with hysteresis, and an isolated cell with retention. Probability
evaluation is pure; sampling takes an owned RNG.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from enum import IntEnum

import numpy as np


class PwmClass(IntEnum):
    """Four-level cell stirrer class with its PWM duty value.

    OFF leaves the cell quiet, FLUCT drives weak random fluctuations, HALO
    is the interaction ring around a core, CORE drives strong oscillation.
    """

    OFF = 0
    FLUCT = 1
    HALO = 2
    CORE = 3

    @property
    def pwm(self) -> int:
        return _PWM_LEVELS[self]


_PWM_LEVELS = {PwmClass.OFF: 0, PwmClass.FLUCT: 22, PwmClass.HALO: 30, PwmClass.CORE: 50}


@dataclass(frozen=True)
class ChemModel2DParams:
    """2D high-state probability parameters (published defaults).

    p1..p4 weight the neighbor cascade, q1..q4 weight the cell's own class
    (off / fluct / core / halo), and the hysteresis factor is k_low when
    the previous chemical state was 0, k_high when it was 1.
    """

    p1: float = 0.5
    p2: float = 0.3
    p3: float = 0.25
    p4: float = 0.1
    q1: float = 0.0
    q2: float = 0.1
    q3: float = 0.5
    q4: float = 0.5
    k_low: float = 0.7
    k_high: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{f.name}={v} outside [0, 1]")

    @classmethod
    def from_dict(cls, d: dict) -> "ChemModel2DParams":
        return cls(**d)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class SingleCellHysteresisParams:
    """Isolated-cell readout fidelity: chance the chemical state tracks
    the commanded bit; a high state may be retained after the command drops."""

    p_read: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.p_read <= 1.0:
            raise ValueError("p_read must be in [0, 1]")


def prob_high_1d(s_c: int, s_l: int, s_r: int, i_l: int, i_r: int) -> float:
    """High-state probability for one cell of the 1D chain.

    First-match evaluation of the eight published stirrer conditions, in
    published order. Patterns matching none of them get probability 0: with
    no hydrodynamic path from an active source there is no coupling.
    """
    if s_c:
        return 1.0
    if s_l == 0 and s_r == 0:
        return 0.0
    if i_l == 0 and i_r == 0:
        return 0.0
    if s_l and s_r and i_l and i_r:
        return 0.8
    if s_l and i_l and not i_r:
        return 0.5
    if s_r and i_r and not i_l:
        return 0.5
    if s_l and not s_r and i_l:
        return 0.5
    if not s_l and s_r and i_r:
        return 0.5
    return 0.0


def _cascade(n_core: int, n_halo: int, n_off: int, p: ChemModel2DParams) -> float:
    if n_core >= 3:
        return p.p1
    if n_core >= 1:
        return p.p2
    if n_halo >= 3:
        return p.p3
    if n_halo >= 1 and n_off <= 3:
        return p.p4
    return 0.0


def prob_high_2d(
    center: PwmClass,
    neighbor_pwms,
    prev_cs: int,
    params: ChemModel2DParams | None = None,
) -> float:
    """High-state probability for one torus cell from its 4-neighbor PWM
    classes, its own class, and its previous chemical state (hysteresis)."""
    params = params or ChemModel2DParams()
    if len(neighbor_pwms) != 4:
        raise ValueError("exactly 4 neighbor classes required on the torus")
    n_core = sum(1 for c in neighbor_pwms if c == PwmClass.CORE)
    n_halo = sum(1 for c in neighbor_pwms if c == PwmClass.HALO)
    n_off = sum(1 for c in neighbor_pwms if c == PwmClass.OFF)
    c = _cascade(n_core, n_halo, n_off, params)
    k = params.k_low if prev_cs == 0 else params.k_high
    if center == PwmClass.CORE:
        return k * params.q3
    q = {PwmClass.OFF: params.q1, PwmClass.FLUCT: params.q2, PwmClass.HALO: params.q4}[
        PwmClass(center)
    ]
    return k * q * c


def prob_high_2d_grid(
    classes: np.ndarray, prev_cs: np.ndarray, params: ChemModel2DParams | None = None
) -> np.ndarray:
    """Vectorized prob_high_2d over a full (h, w) torus of PWM classes."""
    params = params or ChemModel2DParams()
    shifts = [
        np.roll(classes, 1, axis=1),   # left
        np.roll(classes, -1, axis=1),  # right
        np.roll(classes, 1, axis=0),   # up
        np.roll(classes, -1, axis=0),  # down
    ]
    n_core = sum((s == PwmClass.CORE).astype(np.int8) for s in shifts)
    n_halo = sum((s == PwmClass.HALO).astype(np.int8) for s in shifts)
    n_off = sum((s == PwmClass.OFF).astype(np.int8) for s in shifts)
    c = np.select(
        [n_core >= 3, n_core >= 1, n_halo >= 3, (n_halo >= 1) & (n_off <= 3)],
        [params.p1, params.p2, params.p3, params.p4],
        default=0.0,
    )
    k = np.where(prev_cs == 0, params.k_low, params.k_high)
    branch = np.select(
        [classes == PwmClass.OFF, classes == PwmClass.FLUCT, classes == PwmClass.CORE],
        [params.q1 * c, params.q2 * c, params.q3],
        default=params.q4 * c,
    )
    return k * branch


def prob_high_single(
    commanded: int, prev_cs: int, params: SingleCellHysteresisParams | None = None
) -> float:
    """Isolated-cell high-state probability under a commanded PWM bit.

    A high command excites with p_read; after the command drops, an
    existing high state is retained with the complement 1 - p_read; a quiet
    cell with no history stays quiet.
    """
    params = params or SingleCellHysteresisParams()
    if commanded:
        return params.p_read
    return (1.0 - params.p_read) if prev_cs else 0.0


def sample_cs(p: float, rng: np.random.Generator) -> int:
    """Bernoulli draw of a chemical state; deterministic given rng state."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return 1 if rng.random() < p else 0

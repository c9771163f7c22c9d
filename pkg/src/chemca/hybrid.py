"""Hybrid chemical-digital solvers for QUBO/Ising problems.

Type 1 treats the chemical states as the spins: each step flips one cell's
commanded PWM bit, reads every cell back through the hysteresis model, and
accepts with the Metropolis probability min(exp(-dE/k), 1) on the readout
energy. Type 2 treats the commanded PWM bits as the spins and checks each
pairwise interaction against the ideal lookup outcome: a check agrees with
probability p_chem (the deterministic index), a disagreeing check flips the
sign of that pair's energy contribution, and the move is accepted when the
observed total is <= 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .chemodel import SingleCellHysteresisParams, prob_high_single
from .qubo import (
    QuboProblem,
    bits_to_spins,
    config_index,
    energy,
    flip_terms,
    qubo_to_ising,
)


@dataclass
class SolverParams:
    """Knobs shared by both solvers.

    p_chem is the deterministic index of the pairwise consistency check
    (1.0 reduces Type 2 to greedy descent, 0.5 to a random walk). k_temp is
    the Type-1 acceptance temperature. patience=None stops a run after
    50*n proposals without an accepted move when no target energy is set;
    patience=0 disables that stop.
    """

    p_chem: float = 1.0
    k_temp: float = 5.0
    max_steps: int = 10_000
    target_energy: float | None = None
    patience: int | None = None
    hysteresis: SingleCellHysteresisParams = field(default_factory=SingleCellHysteresisParams)

    def __post_init__(self):
        if not 0.0 <= self.p_chem <= 1.0:
            raise ValueError("p_chem must be in [0, 1]")
        if self.k_temp <= 0:
            raise ValueError("k_temp must be positive")

    def resolved_patience(self, n: int) -> int | None:
        if self.patience is not None:
            return self.patience if self.patience > 0 else None
        return None if self.target_energy is not None else 50 * n


@dataclass
class SolveTrace:
    """Per-proposal record of a solver run.

    configs[t] is the binary encoding of the configuration whose energy is
    energies[t] (the chemical readout for Type 1, the commanded spins for
    Type 2), so every recorded energy is recomputable via qubo.energy.
    """

    n: int
    init_config: int
    flips: list[int] = field(default_factory=list)
    observed_de: list[float] = field(default_factory=list)
    true_de: list[float] = field(default_factory=list)
    accepted: list[bool] = field(default_factory=list)
    configs: list[int] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    best_energies: list[float] = field(default_factory=list)
    best_energy: float = math.inf
    best_config: int = -1
    success: bool = False

    @property
    def n_steps(self) -> int:
        return len(self.flips)

    def record(self, h, obs, true, acc, cfg, e):
        self.flips.append(int(h))
        self.observed_de.append(float(obs))
        self.true_de.append(float(true))
        self.accepted.append(bool(acc))
        self.configs.append(int(cfg))
        self.energies.append(float(e))
        if e < self.best_energy:
            self.best_energy = float(e)
            self.best_config = int(cfg)
        self.best_energies.append(self.best_energy)

    def final_config(self) -> int:
        return self.configs[-1] if self.configs else self.init_config

    def write_jsonl(self, path):
        """One JSON object per proposal step."""
        with open(path, "w") as fh:
            for t in range(self.n_steps):
                fh.write(
                    json.dumps(
                        {
                            "step": t,
                            "flip": self.flips[t],
                            "observed_de": self.observed_de[t],
                            "true_de": self.true_de[t],
                            "accepted": self.accepted[t],
                            "config": self.configs[t],
                            "energy": self.energies[t],
                            "best_energy": self.best_energies[t],
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )

    def summary(self) -> dict:
        return {
            "n": self.n,
            "init_config": self.init_config,
            "steps": self.n_steps,
            "final_config": self.final_config(),
            "final_energy": self.energies[-1] if self.energies else None,
            "best_config": self.best_config,
            "best_energy": self.best_energy,
            "success": self.success,
        }


def _init_bits(p: QuboProblem, init, rng: np.random.Generator) -> np.ndarray:
    if init is None:
        return rng.integers(0, 2, p.n).astype(np.uint8)
    x = np.asarray(init, dtype=np.uint8).copy()
    if x.shape != (p.n,):
        raise ValueError("initial config length mismatch")
    return x


def _done(trace: SolveTrace, params: SolverParams, since_accept: int, patience) -> bool:
    if params.target_energy is not None and trace.best_energy <= params.target_energy + 1e-12:
        trace.success = True
        return True
    if patience is not None and since_accept >= patience:
        return True
    return False


def solve_type1(
    p: QuboProblem,
    params: SolverParams | None = None,
    rng: np.random.Generator | None = None,
    init=None,
) -> SolveTrace:
    """Chemical-states-as-spins solver with Metropolis acceptance.

    Each step flips one uniformly random cell's commanded bit, samples every
    cell's chemical readout (a high command excites with p_read, a dropped
    command retains a high state with 1 - p_read), computes the readout
    energy and accepts with min(exp(-dE/k_temp), 1); a rejected flip reverts
    the command and keeps the previous readout. With p_read = 1 this is
    exactly Metropolis on the commanded configuration.
    """
    params = params or SolverParams()
    rng = rng or np.random.default_rng()
    cmd = _init_bits(p, init, rng)
    hyst = params.hysteresis
    read = _readout(cmd, np.zeros(p.n, np.uint8), hyst, rng)
    e_read = energy(p, read)
    trace = SolveTrace(p.n, config_index(read))
    trace.best_energy = e_read
    trace.best_config = config_index(read)
    patience = params.resolved_patience(p.n)
    since_accept = 0
    if params.target_energy is not None and e_read <= params.target_energy + 1e-12:
        trace.success = True
        return trace
    for _ in range(params.max_steps):
        h = int(rng.integers(p.n))
        e_cmd_old = energy(p, cmd)
        cmd[h] ^= 1
        true_de = energy(p, cmd) - e_cmd_old
        new_read = _readout(cmd, read, hyst, rng)
        e_new = energy(p, new_read)
        obs_de = e_new - e_read
        accept = rng.random() < min(1.0, math.exp(-obs_de / params.k_temp))
        if accept:
            read = new_read
            e_read = e_new
            since_accept = 0
        else:
            cmd[h] ^= 1
            since_accept += 1
        trace.record(h, obs_de, true_de, accept, config_index(read), e_read)
        if _done(trace, params, since_accept, patience):
            break
    return trace


def _readout(cmd: np.ndarray, prev: np.ndarray, hyst: SingleCellHysteresisParams, rng):
    probs = np.where(
        cmd == 1, hyst.p_read, np.where(prev == 1, 1.0 - hyst.p_read, 0.0)
    )
    return (rng.random(cmd.shape[0]) < probs).astype(np.uint8)


def observed_delta_e(p: QuboProblem, s, h: int, consistency) -> float:
    """Observed energy change for flipping spin h of spin config s.

    One consistency bit per interacting partner (nonzero coupling), in
    ascending partner order; a 0 bit flips the sign of that pair's term.
    The linear self-term is never sign-flipped.
    """
    s = np.asarray(s, dtype=np.int8)
    ising = qubo_to_ising(p)
    lin, pair = flip_terms(ising, s.astype(float), h)
    partners = np.flatnonzero(ising.coupling[h])
    bits = np.asarray(consistency, dtype=int)
    if bits.shape != (partners.size,):
        raise ValueError(
            f"expected {partners.size} consistency bits for spin {h}, got {bits.shape}"
        )
    signs = 2.0 * bits - 1.0
    return float(lin + (signs * pair[partners]).sum())


class PairwiseChemistry:
    """Chemical-loop consistency backend (demonstration alternative to the
    Bernoulli surrogate).

    Each pairwise check commands the two cells' PWM bits, samples both
    chemical readouts through the single-cell hysteresis model (cells keep
    their previous chemical state between checks), and reports consistency
    when both readouts match the ideal lookup outcome, i.e. the commands
    themselves. Hysteresis makes the effective index drift with history.
    """

    def __init__(self, n: int, hysteresis: SingleCellHysteresisParams | None = None):
        self.hysteresis = hysteresis or SingleCellHysteresisParams()
        self.cs = np.zeros(n, np.uint8)

    def check(self, i: int, j: int, cmd_i: int, cmd_j: int, rng: np.random.Generator) -> int:
        ok = 1
        for cell, cmd in ((i, cmd_i), (j, cmd_j)):
            prob = prob_high_single(cmd, int(self.cs[cell]), self.hysteresis)
            out = 1 if rng.random() < prob else 0
            self.cs[cell] = out
            if out != cmd:
                ok = 0
        return ok


def solve_type2(
    p: QuboProblem,
    params: SolverParams | None = None,
    rng: np.random.Generator | None = None,
    init=None,
    chemistry: PairwiseChemistry | None = None,
) -> SolveTrace:
    """PWM-states-as-spins solver with pairwise chemical consistency checks.

    Each step flips one uniformly random spin and evaluates the energy
    change pair by pair; every pairwise term keeps its sign when its
    consistency check agrees (probability p_chem) and is negated otherwise.
    The flip is accepted when the observed total is <= 0; the true
    configuration changes only on acceptance and true energies are recorded.
    At p_chem = 1 no checks are drawn and the run is identical, proposal for
    proposal, to greedy descent. Passing a PairwiseChemistry instance
    replaces the Bernoulli checks with the chemical-loop backend.
    """
    params = params or SolverParams()
    rng = rng or np.random.default_rng()
    x = _init_bits(p, init, rng)
    s = bits_to_spins(x).astype(float)
    ising = qubo_to_ising(p)
    partners = [np.flatnonzero(ising.coupling[h]) for h in range(p.n)]
    e_true = energy(p, x)
    trace = SolveTrace(p.n, config_index(x))
    trace.best_energy = e_true
    trace.best_config = config_index(x)
    patience = params.resolved_patience(p.n)
    since_accept = 0
    if params.target_energy is not None and e_true <= params.target_energy + 1e-12:
        trace.success = True
        return trace
    for _ in range(params.max_steps):
        h = int(rng.integers(p.n))
        lin, pair = flip_terms(ising, s, h)
        terms = pair[partners[h]]
        true_de = lin + terms.sum()
        if chemistry is not None:
            bits = np.array(
                [
                    chemistry.check(h, int(j), int(x[h] ^ 1), int(x[j]), rng)
                    for j in partners[h]
                ]
            )
            signs = 2.0 * bits - 1.0
            obs_de = lin + (signs * terms).sum()
        elif params.p_chem >= 1.0:
            obs_de = true_de
        else:
            signs = np.where(rng.random(terms.shape[0]) < params.p_chem, 1.0, -1.0)
            obs_de = lin + (signs * terms).sum()
        accept = obs_de <= 0.0
        if accept:
            x[h] ^= 1
            s[h] = -s[h]
            e_true = energy(p, x)
            since_accept = 0
        else:
            since_accept += 1
        trace.record(h, obs_de, true_de, accept, config_index(x), e_true)
        if _done(trace, params, since_accept, patience):
            break
    return trace

"""QUBO/Ising problem model, Hamiltonian builders, oracle and greedy search.

Energy convention: E(x) = offset + linear . x + x^T quad x over bits
x in {0,1}^n, where quad is symmetric with zero diagonal, so the pairwise
coefficient of x_i x_j as written in an expanded Hamiltonian is
2 * quad[i, j]. Spins relate to bits by s = 2x - 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class CapacityError(Exception):
    """Problem size exceeds an enumeration or dense-matrix bound."""


@dataclass
class QuboProblem:
    offset: float
    linear: np.ndarray
    quad: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.linear = np.asarray(self.linear, dtype=float)
        self.quad = np.asarray(self.quad, dtype=float)
        n = self.linear.shape[0]
        if n < 1:
            raise ValueError("at least one variable required")
        if self.quad.shape != (n, n):
            raise ValueError("quadratic matrix shape does not match variable count")
        if not np.allclose(self.quad, self.quad.T):
            raise ValueError("quadratic matrix must be symmetric")
        if np.any(np.diag(self.quad) != 0):
            raise ValueError("quadratic diagonal must be zero (fold it into linear)")

    @property
    def n(self) -> int:
        return self.linear.shape[0]

    def pairwise(self) -> np.ndarray:
        """Full pairwise coefficients c_ij = 2 quad_ij (as printed in an
        expanded Hamiltonian)."""
        return 2.0 * self.quad


def energy(p: QuboProblem, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise ValueError(f"config length {x.shape} does not match n={p.n}")
    return float(p.offset + p.linear @ x + x @ p.quad @ x)


def energies(p: QuboProblem, bits: np.ndarray) -> np.ndarray:
    """Energies of a (m, n) bit matrix in one shot."""
    bits = np.asarray(bits, dtype=float)
    return p.offset + bits @ p.linear + np.einsum("ij,ij->i", bits @ p.quad, bits)


def config_index(x) -> int:
    """Binary encoding of a config: bit i of the index is x_i."""
    return int(sum(int(v) << i for i, v in enumerate(x)))


def index_config(idx: int, n: int) -> np.ndarray:
    return np.array([(idx >> i) & 1 for i in range(n)], dtype=np.uint8)


def spins_to_bits(s) -> np.ndarray:
    return ((np.asarray(s) + 1) // 2).astype(np.uint8)


def bits_to_spins(x) -> np.ndarray:
    return (2 * np.asarray(x, dtype=int) - 1).astype(np.int8)


def build_partition(numbers, penalty: float = 1.0) -> QuboProblem:
    """Number-partitioning Hamiltonian A * (sum n_i s_i)^2 in QUBO form.

    With s = 2x - 1 and x^2 = x folded: offset A*T^2, linear
    A(4 n_i^2 - 4 T n_i), pairwise 8 A n_i n_j (T = sum of the numbers).
    """
    nums = np.asarray(list(numbers), dtype=float)
    if nums.size == 0:
        raise ValueError("number set must be nonempty")
    if np.any(nums <= 0):
        raise ValueError("numbers must be positive")
    total = nums.sum()
    offset = penalty * total * total
    linear = penalty * (4.0 * nums**2 - 4.0 * total * nums)
    quad = penalty * 4.0 * np.outer(nums, nums)
    np.fill_diagonal(quad, 0.0)
    return QuboProblem(offset, linear, quad, {"kind": "partition", "numbers": list(map(float, nums)), "penalty": penalty})


def build_2sat(clauses, penalty: float = 1.0) -> QuboProblem:
    """2-SAT Hamiltonian A * sum_clauses prod_j (1 - w_j s_j).

    Clauses are pairs of nonzero integer literals (DIMACS style, variables
    1..n, negative for negation); each violated clause costs 4A.
    """
    clauses = [tuple(cl) for cl in clauses]
    if not clauses:
        raise ValueError("clause list must be nonempty")
    n = 0
    for cl in clauses:
        if len(cl) != 2 or any(lit == 0 for lit in cl):
            raise ValueError(f"clause {cl} must hold exactly two nonzero literals")
        if abs(cl[0]) == abs(cl[1]):
            raise ValueError(f"clause {cl} repeats a variable")
        n = max(n, abs(cl[0]), abs(cl[1]))
    offset = 0.0
    linear = np.zeros(n)
    quad = np.zeros((n, n))
    for la, lb in clauses:
        va, wa = abs(la) - 1, float(np.sign(la))
        vb, wb = abs(lb) - 1, float(np.sign(lb))
        offset += penalty * (1.0 + wa + wb + wa * wb)
        linear[va] += penalty * (-2.0 * wa - 2.0 * wa * wb)
        linear[vb] += penalty * (-2.0 * wb - 2.0 * wa * wb)
        quad[va, vb] += penalty * 2.0 * wa * wb
        quad[vb, va] += penalty * 2.0 * wa * wb
    return QuboProblem(offset, linear, quad, {"kind": "2sat", "clauses": [list(c) for c in clauses], "penalty": penalty})


def distance_matrix_from_coords(coords) -> np.ndarray:
    pts = np.asarray(coords, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def build_tsp(distances, penalty: float = 1.0, scale: float | None = None) -> QuboProblem:
    """Traveling-salesman Hamiltonian over N^2 one-hot variables.

    Variable (i, j) means city j occupies tour position i (flat index
    i*N + j). Row and column one-hot penalties cost `penalty` each;
    adjacent positions couple with scaled distances d' = scale * d, where
    the default scale makes max(d') = 0.1.
    """
    d = np.asarray(distances, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.allclose(d, d.T) or np.any(np.diag(d) != 0) or np.any(d < 0):
        raise ValueError("distance matrix must be symmetric, nonnegative, zero-diagonal")
    n_city = d.shape[0]
    if n_city < 2:
        raise ValueError("at least two cities required")
    if scale is None:
        scale = 0.1 / d.max()
    dscaled = scale * d
    n = n_city * n_city
    var = lambda pos, city: pos * n_city + city
    offset = 2.0 * penalty * n_city
    linear = np.full(n, -2.0 * penalty)
    quad = np.zeros((n, n))
    for i in range(n_city):
        for a in range(n_city):
            for b in range(a + 1, n_city):
                quad[var(i, a), var(i, b)] += penalty  # same position, two cities
                quad[var(a, i), var(b, i)] += penalty  # same city, two positions
    for u in range(n_city):
        for v in range(n_city):
            if u == v:
                continue
            for i in range(n_city):
                a, b = var(i, u), var((i + 1) % n_city, v)
                quad[a, b] += dscaled[u, v] / 2.0
    quad = quad + quad.T - np.diag(np.diag(quad))
    np.fill_diagonal(quad, 0.0)
    meta = {"kind": "tsp", "n_cities": n_city, "scale": scale, "penalty": penalty}
    return QuboProblem(offset, linear, quad, meta)


def tour_from_config(x, n_city: int) -> list[int] | None:
    """Decode a one-hot TSP config to the city visited at each position,
    or None if any row/column constraint is violated."""
    m = np.asarray(x).reshape(n_city, n_city)
    if np.any(m.sum(axis=1) != 1) or np.any(m.sum(axis=0) != 1):
        return None
    return [int(np.argmax(row)) for row in m]


def brute_force_min(p: QuboProblem, max_vars: int = 24, chunk: int = 1 << 16):
    """Exhaustive oracle: exact minimum energy and all argmin configs.

    Ties are collected with an absolute tolerance a few ulps wide so that
    symmetric encodings whose float sums differ only in the last place are
    all reported.
    """
    if p.n > max_vars:
        raise CapacityError(f"brute force capped at {max_vars} variables, got {p.n}")
    n = p.n
    total = 1 << n
    shifts = np.arange(n, dtype=np.uint64)
    best = np.inf
    argmins: list[int] = []
    tol = 0.0
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        idx = np.arange(lo, hi, dtype=np.uint64)
        bits = ((idx[:, None] >> shifts) & np.uint64(1)).astype(float)
        e = energies(p, bits)
        lo_min = float(e.min())
        if lo_min < best - tol:
            best = lo_min
            tol = 1e-9 * max(1.0, abs(best))
            argmins = []
        mask = e <= best + tol
        argmins.extend(int(i) for i in idx[mask])
    configs = [index_config(i, n) for i in sorted(argmins)]
    return best, configs


@dataclass
class IsingModel:
    """Spin form of a QUBO: E(s) = offset + g . s + sum_{i<j} J_ij s_i s_j."""

    offset: float
    g: np.ndarray
    coupling: np.ndarray

    @property
    def n(self) -> int:
        return self.g.shape[0]


def qubo_to_ising(p: QuboProblem) -> IsingModel:
    c = p.pairwise()
    row = c.sum(axis=1)
    g = p.linear / 2.0 + row / 4.0
    offset = p.offset + p.linear.sum() / 2.0 + row.sum() / 8.0
    return IsingModel(float(offset), g, c / 4.0)


def ising_energy(m: IsingModel, s) -> float:
    s = np.asarray(s, dtype=float)
    return float(m.offset + m.g @ s + (s @ m.coupling @ s) / 2.0)


def flip_terms(m: IsingModel, s: np.ndarray, h: int) -> tuple[float, np.ndarray]:
    """Energy-change decomposition for flipping spin h.

    Returns (linear_term, pairwise_terms) with true delta-E equal to
    linear_term + pairwise_terms.sum(); pairwise_terms[i] is the
    contribution of partner i (zero where the coupling is zero).
    """
    delta = -2.0 * s[h]
    return float(delta * m.g[h]), delta * m.coupling[h] * s


@dataclass
class GreedyTrace:
    init_config: int
    flips: list[int]
    accepted: list[bool]
    configs: list[int]
    energies: list[float]

    @property
    def final_energy(self) -> float:
        return self.energies[-1] if self.energies else np.nan


def greedy_descent(
    p: QuboProblem,
    init,
    rng: np.random.Generator,
    max_iters: int = 10_000,
) -> GreedyTrace:
    """Random single-flip descent: flip a uniformly picked variable when
    delta-E <= 0; stop once no strictly improving flip exists anywhere
    (equal-energy flips are taken while improvements remain elsewhere) or
    after max_iters proposals. Every visited configuration is recorded.
    """
    x = np.asarray(init, dtype=np.uint8).copy()
    if x.shape != (p.n,):
        raise ValueError("initial config length mismatch")
    pair = p.pairwise()
    e = energy(p, x)
    trace = GreedyTrace(config_index(x), [], [], [], [])
    for _ in range(max_iters):
        all_de = (1.0 - 2.0 * x) * (p.linear + pair @ x)
        if all_de.min() >= 0.0:
            break
        h = int(rng.integers(p.n))
        de = float(all_de[h])
        accepted = de <= 0.0
        if accepted:
            x[h] ^= 1
            e = energy(p, x)
        trace.flips.append(h)
        trace.accepted.append(accepted)
        trace.configs.append(config_index(x))
        trace.energies.append(e)
    return trace


def dump_problem(p: QuboProblem) -> dict:
    d = dict(p.metadata)
    d.setdefault("kind", "explicit")
    if d["kind"] == "explicit":
        d.update(
            offset=p.offset,
            linear=[float(v) for v in p.linear],
            quad=[[float(v) for v in row] for row in p.quad],
        )
    return d


def load_problem(source) -> QuboProblem:
    """Build a problem from a dict or a JSON file path.

    Kinds: partition {numbers}, 2sat {clauses}, tsp {coords or distances,
    scale}, explicit {offset, linear, quad} where quad is either the full
    symmetric half-weight matrix or {"i,j": c} pairwise coefficients
    (both conventions accepted; pairwise values are halved on load).
    """
    if not isinstance(source, dict):
        with open(source) as fh:
            source = json.load(fh)
    kind = source.get("kind")
    penalty = float(source.get("penalty", 1.0))
    if kind == "partition":
        return build_partition(source["numbers"], penalty)
    if kind == "2sat":
        return build_2sat([tuple(c) for c in source["clauses"]], penalty)
    if kind == "tsp":
        if "distances" in source:
            d = np.asarray(source["distances"], dtype=float)
        else:
            d = distance_matrix_from_coords(source["coords"])
        return build_tsp(d, penalty, source.get("scale"))
    if kind == "explicit":
        linear = np.asarray(source["linear"], dtype=float)
        n = linear.shape[0]
        if "pairs" in source:
            quad = np.zeros((n, n))
            for key, c in source["pairs"].items():
                i, j = (int(v) for v in key.split(","))
                quad[i, j] += float(c) / 2.0
                quad[j, i] += float(c) / 2.0
        else:
            quad = np.asarray(source["quad"], dtype=float)
        return QuboProblem(float(source.get("offset", 0.0)), linear, quad, {"kind": "explicit"})
    raise ValueError(f"unknown problem kind: {kind!r}")


def write_solution_json(path, p: QuboProblem, emin: float, configs):
    payload = {
        "problem": {k: v for k, v in p.metadata.items()},
        "min_energy": emin,
        "argmin_configs": [[int(v) for v in c] for c in configs],
        "argmin_indices": [config_index(c) for c in configs],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

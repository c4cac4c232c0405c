"""Exact statevector simulation of the alternating phase/mixer circuit.

Basis convention: bit i of the amplitude index holds the value at vertex i,
with index 0 the least significant bit. A bit string "b0b1..." therefore
reads vertex 0 first, matching the command line and report formats.

The circuit applies, per layer k, the diagonal phase exp(-i*gamma_k*C) for
the chosen per-edge cost C, then the product of single-qubit rotations
exp(-i*beta_k*X) on every qubit, starting from a product initial state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError, ResourceError
from .graphs import Graph
from .rng import as_generator

__all__ = [
    "DEFAULT_QUBIT_CAP",
    "MAXCUT",
    "MIS",
    "INITIAL_STATES",
    "CostModel",
    "QaoaParams",
    "Statevector",
    "bits_to_index",
    "index_to_bits",
    "bit_values",
    "edge_cost",
    "cost_value",
    "cost_table",
    "prepare_initial",
    "apply_phase",
    "apply_mixer",
    "run_qaoa",
    "expect_edge",
    "expect_total",
    "sample_bitstrings",
]

DEFAULT_QUBIT_CAP = 26  # 2**26 complex128 amplitudes is 1 GiB

MAXCUT = "maxcut"
MIS = "mis"
INITIAL_STATES = ("zero", "plus")


@dataclass(frozen=True)
class CostModel:
    """Per-edge cost function.

    "maxcut" pays 1 when the endpoints disagree. "mis" pays
    (b_i + b_j)/(2d) - b_i*b_j per edge of a d-regular graph, so exact
    values are rationals with denominator 2d.
    """

    kind: str
    d: int | None = None

    def __post_init__(self):
        if self.kind not in (MAXCUT, MIS):
            raise InputError(f"unknown cost model {self.kind!r}")
        if self.kind == MIS and (self.d is None or int(self.d) < 1):
            raise InputError("the independent-set cost needs a degree d >= 1")

    @classmethod
    def maxcut(cls) -> "CostModel":
        return cls(MAXCUT)

    @classmethod
    def mis(cls, d: int) -> "CostModel":
        return cls(MIS, int(d))

    @property
    def denominator(self) -> int:
        return 1 if self.kind == MAXCUT else 2 * self.d

    @property
    def gamma_period(self) -> float:
        # The cost spectrum lives on (1/denominator)*Z, so the phase
        # exp(-i*gamma*C) repeats with this gamma period.
        return 2.0 * math.pi * self.denominator


@dataclass(frozen=True)
class QaoaParams:
    """Angle schedule: one gamma and one beta per layer, p >= 0 layers."""

    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(float(x) for x in self.gammas))
        object.__setattr__(self, "betas", tuple(float(x) for x in self.betas))
        if len(self.gammas) != len(self.betas):
            raise InputError("gammas and betas must have equal length")

    @property
    def p(self) -> int:
        return len(self.gammas)

    @classmethod
    def zeros(cls, p: int) -> "QaoaParams":
        return cls((0.0,) * p, (0.0,) * p)


@dataclass
class Statevector:
    """2**m complex amplitudes over an m-qubit register, unit norm."""

    m: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.m = int(self.m)
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.m < 1 or self.amplitudes.shape != (1 << self.m,):
            raise InputError("amplitude vector must have length 2**m, m >= 1")
        nrm = self.norm()
        if abs(nrm - 1.0) > 1e-12:
            raise InputError(f"state is not normalized: |norm-1| = {abs(nrm - 1.0):.3e}")

    def norm(self) -> float:
        a = self.amplitudes
        return float(np.sqrt(np.sum(a.real * a.real + a.imag * a.imag)))

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real * a.real + a.imag * a.imag


def bit_values(bits, n: int | None = None) -> list[int]:
    """Normalize a bit string ("0110") or 0/1 sequence to a list of ints."""
    if isinstance(bits, str):
        if any(c not in "01" for c in bits):
            raise InputError("bit strings may only contain 0 and 1")
        vals = [int(c) for c in bits]
    else:
        vals = [int(b) for b in bits]
        if any(b not in (0, 1) for b in vals):
            raise InputError("bit values must be 0 or 1")
    if n is not None and len(vals) != n:
        raise InputError(f"expected {n} bits, got {len(vals)}")
    return vals


def bits_to_index(bits) -> int:
    """Index of a basis state; bit i of the result is vertex i's value."""
    idx = 0
    for i, b in enumerate(bit_values(bits)):
        if b:
            idx |= 1 << i
    return idx


def index_to_bits(index: int, m: int) -> str:
    """Inverse of :func:`bits_to_index`; vertex 0 is the first character."""
    return "".join("1" if (index >> i) & 1 else "0" for i in range(m))


def edge_cost(model: CostModel, bi: int, bj: int) -> Fraction:
    """Exact per-edge cost at bit values (bi, bj)."""
    if bi not in (0, 1) or bj not in (0, 1):
        raise InputError("bit values must be 0 or 1")
    if model.kind == MAXCUT:
        return Fraction(bi ^ bj)
    return Fraction(bi + bj, 2 * model.d) - bi * bj


def cost_value(model: CostModel, g: Graph, bits) -> Fraction:
    """Exact total cost of a bit assignment: sum of edge_cost over edges."""
    vals = bit_values(bits, g.n)
    total = Fraction(0)
    for u, v in g.edges:
        total += edge_cost(model, vals[u], vals[v])
    return total


def _edge_view(arr: np.ndarray, m: int, i: int, j: int) -> np.ndarray:
    # Reshape so axis 1 is bit j and axis 3 is bit i (requires i < j).
    return arr.reshape(1 << (m - 1 - j), 2, 1 << (j - 1 - i), 2, 1 << i)


def cost_table(model: CostModel, g: Graph) -> np.ndarray:
    """Vector of total cost over all 2**n basis states.

    Accumulates integer numerators in float64 (exact at these sizes) and
    divides once by the model denominator.
    """
    m = g.n
    num = np.zeros(1 << m)
    penalty = float(2 - 2 * model.d) if model.kind == MIS else 0.0
    for u, v in g.edges:
        view = _edge_view(num, m, u, v)
        view[:, 0, :, 1, :] += 1.0
        view[:, 1, :, 0, :] += 1.0
        if model.kind == MIS:
            view[:, 1, :, 1, :] += penalty
    if model.kind == MIS:
        num /= float(2 * model.d)
    return num


def prepare_initial(
    m: int, initial: str = "plus", qubit_cap: int = DEFAULT_QUBIT_CAP
) -> Statevector:
    """Product initial state: "zero" is |0...0>, "plus" the uniform state."""
    if initial not in INITIAL_STATES:
        raise InputError(f"unknown initial state {initial!r}")
    m = int(m)
    if m < 1:
        raise InputError("need at least one qubit")
    if m > qubit_cap:
        raise ResourceError(f"{m} qubits exceed the cap of {qubit_cap}")
    if initial == "zero":
        amps = np.zeros(1 << m, dtype=np.complex128)
        amps[0] = 1.0
    else:
        amps = np.full(1 << m, 2.0 ** (-m / 2.0), dtype=np.complex128)
    return Statevector(m, amps)


def _mix_inplace(amps: np.ndarray, m: int, beta: float) -> None:
    # exp(-i*beta*X) = [[cos b, -i sin b], [-i sin b, cos b]] on each qubit.
    c = math.cos(beta)
    s = math.sin(beta)
    if s == 0.0:
        if c != 1.0:
            amps *= c  # beta = pi: global factor -1
        return
    for k in range(m):
        view = amps.reshape(-1, 2, 1 << k)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = c * a0 - 1j * s * a1
        view[:, 1, :] = c * a1 - 1j * s * a0


def apply_phase(state: Statevector, g: Graph, model: CostModel, gamma: float) -> Statevector:
    """Multiply each amplitude by exp(-i*gamma*C(b))."""
    if state.m != g.n:
        raise InputError("state register and graph sizes differ")
    table = cost_table(model, g)
    return Statevector(state.m, state.amplitudes * np.exp((-1j * float(gamma)) * table))


def apply_mixer(state: Statevector, beta: float) -> Statevector:
    """Apply exp(-i*beta*X) to every qubit."""
    amps = state.amplitudes.copy()
    _mix_inplace(amps, state.m, float(beta))
    return Statevector(state.m, amps)


def run_qaoa(
    g: Graph,
    model: CostModel,
    params: QaoaParams,
    initial: str = "plus",
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> Statevector:
    """Prepare the initial state and apply all p layers in order."""
    state = prepare_initial(g.n, initial, qubit_cap)
    if params.p == 0:
        return state
    table = cost_table(model, g)
    amps = state.amplitudes  # freshly allocated, safe to evolve in place
    for gamma, beta in zip(params.gammas, params.betas):
        amps *= np.exp((-1j * gamma) * table)
        _mix_inplace(amps, g.n, beta)
    return Statevector(g.n, amps)


def _edge_marginals(amps: np.ndarray, m: int, i: int, j: int) -> np.ndarray:
    """2x2 array P with P[a, b] = Prob(bit_i = a, bit_j = b); needs i < j."""
    view = _edge_view(amps, m, i, j)
    p = (view.real**2 + view.imag**2).sum(axis=(0, 2, 4))
    return p.T  # sum produced [bit_j, bit_i]


def expect_edge(state: Statevector, edge, model: CostModel) -> float:
    """Expectation of one edge's cost in the given state."""
    u, v = int(edge[0]), int(edge[1])
    if u == v:
        raise InputError("edge endpoints must differ")
    if u > v:
        u, v = v, u
    if v >= state.m or u < 0:
        raise InputError("edge endpoint outside the register")
    P = _edge_marginals(state.amplitudes, state.m, u, v)
    total = 0.0
    for a in (0, 1):
        for b in (0, 1):
            total += P[a, b] * float(edge_cost(model, a, b))
    return float(total)


def expect_total(state: Statevector, g: Graph, model: CostModel) -> float:
    """Expectation of the total cost; equals the sum of edge expectations."""
    if state.m != g.n:
        raise InputError("state register and graph sizes differ")
    return float(np.dot(state.probabilities(), cost_table(model, g)))


def sample_bitstrings(state: Statevector, count: int, seed) -> list[str]:
    """Draw basis-state samples; deterministic for a given seed."""
    count = int(count)
    if count < 0:
        raise InputError("sample count must be nonnegative")
    rng = as_generator(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    picks = rng.choice(probs.size, size=count, p=probs)
    return [index_to_bits(int(b), state.m) for b in picks]

"""Worked networks: the quantum Fourier transform and Schrödinger time evolution."""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .composer import compose_sum, drawer_postselect, two_register_compose, two_register_state
from .elements import Element, Kind, Network, Primitive, Product, apply_steps, q_network
from .operators import (
    DimensionError,
    JointState,
    RegisterSpec,
    as_matrix,
    expm_oracle,
)
from .synthesis import exchange

MAX_STEPS = 1_000_000


class PhaseRule(enum.Enum):
    # phi_j = 2**j * pi * n / (2**k - 1), as printed
    PAPER_LITERAL = "paper"
    # phi_j = 2 * pi * 2**j * n / 2**k
    STANDARD = "standard"


@dataclass(frozen=True)
class QftConvention:
    phase_rule: PhaseRule = PhaseRule.STANDARD
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "phase_rule", PhaseRule(self.phase_rule))

    def phases(self, n: int, spec: RegisterSpec) -> np.ndarray:
        """Phase angle on each qubit ``j`` for column ``n``."""
        j = np.arange(spec.k)
        if self.phase_rule is PhaseRule.PAPER_LITERAL:
            # (2**j * n) mod (2N - 2) keeps the angle exact before scaling by pi
            period = 2 * (spec.N - 1)
            return self.sign * math.pi * (((1 << j) * n) % period) / (spec.N - 1)
        return self.sign * 2 * math.pi * (((1 << j) * n) % spec.N) / spec.N


def qft_column(n: int, spec: RegisterSpec, conv: QftConvention) -> np.ndarray:
    """``B(n) H |0⟩``: each qubit in ``(|0⟩ + e^{iφ_j}|1⟩)/√2``, qubit 0 least significant."""
    col = np.ones(1, dtype=complex)
    for phi in reversed(conv.phases(n, spec)):
        col = np.kron(col, np.array([1, np.exp(1j * phi)]) / math.sqrt(2))
    return col


def qft_matrix(spec: RegisterSpec, conv: QftConvention = QftConvention()) -> np.ndarray:
    return np.column_stack([qft_column(n, spec, conv) for n in range(spec.N)])


def qft_network(
    spec: RegisterSpec, conv: QftConvention = QftConvention(), check_exchange: bool = True
) -> Network:
    """One element per ``(m, n)`` with coefficient ``(B(n)H)_{m0}`` on branch ``E(m,n)|n⟩⟨n|``.

    With ``check_exchange`` each branch is confirmed to be ``|m⟩⟨n|`` by running
    the neighbour-exchange chain on ``|n⟩``.
    """
    children = []
    for n in range(spec.N):
        col = qft_column(n, spec, conv)
        for m in range(spec.N):
            if col[m] == 0:
                continue
            if check_exchange and exchange(m, n, spec).permutation()[n] != m:
                raise AssertionError(f"E({m},{n}) does not map |{n}⟩ to |{m}⟩")
            children.append((m, n, col[m]))
    children.sort()  # row-major, like q_network
    return Network(spec, Product(tuple(Primitive(Element.branch(*c)) for c in children)))


# -- time evolution -------------------------------------------------------------


@dataclass(frozen=True)
class EvolutionSpec:
    """``H = T + V`` stepped ``steps`` times with step ``dt``.

    The propagator is ``e^{+iHt}``; pass ``-H`` for the ``e^{-iHt}`` convention.
    """

    t_matrix: np.ndarray
    v_matrix: np.ndarray
    dt: float
    steps: int = 1

    def __post_init__(self):
        t = as_matrix(self.t_matrix, square=True)
        v = as_matrix(self.v_matrix, square=True)
        if t.shape != v.shape:
            raise DimensionError(f"T is {t.shape}, V is {v.shape}")
        dt = float(self.dt)
        if not math.isfinite(dt) or dt < 0:
            raise ValueError(f"dt must be finite and >= 0, got {self.dt!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps!r}")
        if self.steps > MAX_STEPS or not math.isfinite(self.steps * dt):
            raise ValueError(f"steps={self.steps} with dt={dt} is out of range")
        object.__setattr__(self, "t_matrix", t)
        object.__setattr__(self, "v_matrix", v)
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def spec(self) -> RegisterSpec:
        return RegisterSpec.from_dim(self.t_matrix.shape[0])

    @property
    def hamiltonian(self) -> np.ndarray:
        return self.t_matrix + self.v_matrix

    @property
    def total_time(self) -> float:
        return self.steps * self.dt

    def step_operator(self) -> np.ndarray:
        """``Ω(dt) = I + i dt (T + V)``, first order."""
        return np.eye(self.t_matrix.shape[0], dtype=complex) + 1j * self.dt * self.hamiltonian


def evolution_step_network(es: EvolutionSpec) -> Network:
    """``Q(I) Q(i dt T) Q(i dt V)``, which realizes ``Ω(dt)``."""
    spec = es.spec
    eye = np.eye(spec.N, dtype=complex)
    return compose_sum(
        [
            q_network(eye, spec),
            q_network(1j * es.dt * es.t_matrix, spec),
            q_network(1j * es.dt * es.v_matrix, spec),
        ]
    )


def evolution_network(es: EvolutionSpec) -> Network:
    """Two-register chain of ``es.steps`` copies of the step network."""
    return two_register_compose([evolution_step_network(es)] * es.steps)


@dataclass(frozen=True)
class TrajectoryRow:
    step: int
    time: float
    error_maxabs: float
    norm: float
    postselect_prob: float


@dataclass
class EvolutionResult:
    rows: list[TrajectoryRow]
    final_state: np.ndarray  # Ω^steps ψ0, unnormalized
    exact_state: np.ndarray  # expm(i H t) ψ0
    final_error: float
    final_probability: float
    network: Network = field(repr=False)

    def to_csv(self) -> str:
        return trajectory_csv(self.rows)


CSV_HEADER = ("step", "time", "error_maxabs", "norm", "postselect_prob")


def trajectory_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [r.step] + [f"{v:.17g}" for v in (r.time, r.error_maxabs, r.norm, r.postselect_prob)]
        )
    return buf.getvalue()


def _out_register(vec: np.ndarray, psi_in: np.ndarray, N: int, ancilla: int) -> np.ndarray:
    """Contract the input register with ``⟨psi_in|`` and read one ancilla branch."""
    return np.tensordot(np.conj(psi_in), vec.reshape(N, N, 2), axes=(0, 0))[:, ancilla]


def evolve(psi0, es: EvolutionSpec, norm_tol: float = 1e-10) -> EvolutionResult:
    """Run the chained evolution network on ``psi0 ⊗ (psi0 ⊗ |0⟩)``.

    One trajectory row is recorded per completed step: error against the exact
    propagator, norm of the unnormalized register state, and the Drawer
    outcome-1 probability right after that step's ``Q(Ω)``.
    """
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    spec = es.spec
    if psi0.shape[0] != spec.N:
        raise DimensionError(f"psi0 has {psi0.shape[0]} amplitudes, register needs {spec.N}")
    if abs(np.linalg.norm(psi0) - 1) > norm_tol:
        raise ValueError(f"psi0 must be normalized (norm {np.linalg.norm(psi0):.3g})")

    net = evolution_network(es)
    N = spec.N
    exact_step = expm_oracle(1j * es.dt * es.hamiltonian)
    exact = psi0.copy()
    rows: list[TrajectoryRow] = []
    connectors_seen = 0
    prev = vec = two_register_state(psi0, spec)
    for node, vec in apply_steps(net, vec):
        if isinstance(node, Primitive) and node.element.kind is Kind.CONNECTOR:
            connectors_seen += 1
            # the first Connector only resets the ancilla after the opening C†
            if connectors_seen > 1:
                step = connectors_seen - 1
                exact = exact_step @ exact
                current = _out_register(vec, psi0, N, 0)
                joint = JointState(spec, _out_register(prev, psi0, N, slice(None)).reshape(-1))
                rows.append(
                    TrajectoryRow(
                        step,
                        step * es.dt,
                        float(np.max(np.abs(current - exact))),
                        float(np.linalg.norm(current)),
                        drawer_postselect(joint, 1).probability,
                    )
                )
        prev = vec

    final = _out_register(vec, psi0, N, 1)
    exact_final = expm_oracle(1j * es.total_time * es.hamiltonian) @ psi0
    out_joint = JointState(spec, _out_register(vec, psi0, N, slice(None)).reshape(-1))
    if out_joint.norm == 0:
        prob = 0.0
    else:
        prob = drawer_postselect(out_joint, 1).probability
    return EvolutionResult(
        rows,
        final,
        exact_final,
        float(np.max(np.abs(final - exact_final))),
        prob,
        net,
    )


def harmonic_oscillator(n_grid: int = 16, half_width: float = 4.0) -> tuple[np.ndarray, np.ndarray]:
    """Kinetic and potential matrices for ``H = -½ d²/dx² + x²/2`` on a uniform grid.

    Three-point finite differences with zero boundary values.
    """
    x = np.linspace(-half_width, half_width, n_grid)
    h = x[1] - x[0]
    t = (np.diag(np.full(n_grid, 1.0)) - 0.5 * np.eye(n_grid, k=1) - 0.5 * np.eye(n_grid, k=-1)) / h**2
    v = np.diag(x**2 / 2)
    return t.astype(complex), v.astype(complex)

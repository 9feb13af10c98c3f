"""Dense complex linear algebra on register and joint (register + ancilla) spaces.

Conventions used everywhere in the package:

* qubit ``i`` of a register basis label ``m`` is bit ``i`` of ``m`` (qubit 0 is
  the least significant bit), so in a Kronecker product the *last* factor acts
  on qubit 0;
* the joint index of register state ``m`` with ancilla bit ``a`` is ``2*m + a``
  (the ancilla is the fastest varying index), i.e. joint operators are
  ``register_op ⊗ ancilla_op``.

The functions ``expm_oracle`` and ``dft_matrix`` are brute-force references.
They are used by tests and verification commands, never by the network
evaluation or application paths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-10
MAX_QUBITS = 10


class DimensionError(ValueError):
    """Raised when operands have incompatible or invalid shapes."""


@dataclass(frozen=True)
class RegisterSpec:
    """A ``k``-qubit register of dimension ``N = 2**k``."""

    k: int
    max_qubits: int = field(default=MAX_QUBITS, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError(f"qubit count must be an integer >= 1, got {self.k!r}")
        if self.k > self.max_qubits:
            raise ValueError(f"qubit count {self.k} exceeds the limit {self.max_qubits}")

    @property
    def N(self) -> int:
        return 1 << self.k

    @property
    def joint_dim(self) -> int:
        return 2 * self.N

    @classmethod
    def from_dim(cls, dim: int) -> "RegisterSpec":
        if dim < 2 or dim & (dim - 1):
            raise DimensionError(f"register dimension must be a power of two >= 2, got {dim}")
        return cls(dim.bit_length() - 1)

    def check_index(self, m: int, what: str = "index") -> int:
        if not 0 <= m < self.N:
            raise IndexError(f"{what} {m} out of range for k={self.k} (N={self.N})")
        return int(m)

    def bit(self, m: int, i: int) -> int:
        """Value of qubit ``i`` in basis state ``m``."""
        return (m >> i) & 1


@dataclass(frozen=True)
class JointState:
    """Amplitudes on register ⊗ ancilla, index ``2*m + a``. Not normalized."""

    spec: RegisterSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.spec.joint_dim:
            raise DimensionError(
                f"joint state needs {self.spec.joint_dim} amplitudes, got {amps.shape[0]}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def prepare(cls, psi, spec: RegisterSpec | None = None, ancilla: int = 0) -> "JointState":
        """``psi ⊗ |ancilla⟩``."""
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        spec = spec or RegisterSpec.from_dim(psi.shape[0])
        if psi.shape[0] != spec.N:
            raise DimensionError(f"register state needs {spec.N} amplitudes, got {psi.shape[0]}")
        return cls(spec, np.kron(psi, basis(2, ancilla)))

    @classmethod
    def basis_state(cls, spec: RegisterSpec, m: int, ancilla: int = 0) -> "JointState":
        return cls(spec, basis(spec.joint_dim, 2 * spec.check_index(m) + ancilla))

    def ancilla_component(self, a: int) -> np.ndarray:
        """Register vector multiplying ``|a⟩_A``."""
        return self.amplitudes.reshape(self.spec.N, 2)[:, a].copy()

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def basis(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


class AncillaOps:
    """Single-ancilla operators: ``c = |0⟩⟨1|`` and ``c† = |1⟩⟨0|`` act like a fermionic pair."""

    c = np.array([[0, 1], [0, 0]], dtype=complex)
    c_dag = np.array([[0, 0], [1, 0]], dtype=complex)
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    identity = np.eye(2, dtype=complex)

    @classmethod
    def projector(cls, outcome: int) -> np.ndarray:
        if outcome not in (0, 1):
            raise ValueError(f"ancilla outcome must be 0 or 1, got {outcome!r}")
        return cls.p1 if outcome else cls.p0


for _name in ("c", "c_dag", "p0", "p1", "identity"):
    getattr(AncillaOps, _name).setflags(write=False)


def as_matrix(a, square: bool = False) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product, row-major blocks: ``(a ⊗ b)[i*p + j, k*q + l] = a[i,k] b[j,l]``."""
    a, b = as_matrix(a), as_matrix(b)
    p, q = b.shape
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(a.shape[0] * p, a.shape[1] * q)


def ketbra(m: int, n: int, dim: int) -> np.ndarray:
    """``|m⟩⟨n|`` as a dense ``dim × dim`` matrix."""
    out = np.zeros((dim, dim), dtype=complex)
    out[m, n] = 1.0
    return out


def joint(register_op, ancilla_op) -> np.ndarray:
    return kron(register_op, ancilla_op)


def raise_ancilla(u) -> np.ndarray:
    """``u ⊗ c†``."""
    return kron(u, AncillaOps.c_dag)


def closed_form(u) -> np.ndarray:
    """Matrix every network for ``u`` must evaluate to: ``I + u ⊗ c†``."""
    u = as_matrix(u, square=True)
    return np.eye(2 * u.shape[0], dtype=complex) + raise_ancilla(u)


def max_abs_diff(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def allclose(a, b, tol: float = DEFAULT_TOL) -> bool:
    return max_abs_diff(a, b) < tol


def _one_norm(a: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0


def expm_oracle(m, order: int = 18) -> np.ndarray:
    """Reference matrix exponential by scaling and squaring with a Taylor core.

    The matrix is scaled by ``2**-s`` until its 1-norm is at most 1/2, the
    truncated series of the given order is summed (terms below machine
    precision stop the sum early) and the result is squared ``s`` times.
    Nilpotent inputs therefore come out exact up to rounding.
    """
    a = as_matrix(m, square=True)
    n = a.shape[0]
    norm = _one_norm(a)
    s = 0 if norm <= 0.5 else int(math.ceil(math.log2(norm / 0.5)))
    a = a / (1 << s) if s < 1023 else a * 2.0 ** (-s)
    result = np.eye(n, dtype=complex) + a
    term = a
    # ‖a‖₁ ≤ 1/2 here, so ‖result‖ = O(1) and an absolute cutoff is enough
    for j in range(2, order + 1):
        term = term @ a
        term /= j
        peak = np.abs(term).max() if n else 0.0
        if peak == 0.0:
            break
        result += term
        if peak < 1e-18:
            break
    for _ in range(s):
        result = result @ result
    return result


def taylor_expm(m, order: int = 30) -> np.ndarray:
    """Plain truncated Taylor series, no scaling. Only sensible for small norms."""
    a = as_matrix(m, square=True)
    result = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for j in range(1, order + 1):
        term = term @ a / j
        result = result + term
    return result


def dft_matrix(spec: RegisterSpec, sign: int = 1) -> np.ndarray:
    """``F[m, n] = N**-0.5 * exp(sign * 2πi m n / N)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    N = spec.N
    idx = np.arange(N)
    # reduce mn mod N before scaling to keep the phases exact for large N
    phase = (np.outer(idx, idx) % N) / N
    return np.exp(sign * 2j * np.pi * phase) / math.sqrt(N)


def random_complex_matrix(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = random_complex_matrix(rng, dim)
    return (a + a.conj().T) / 2


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(random_complex_matrix(rng, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))

"""Standard-gate constructions behind the QCPU elements.

``|m⟩⟨n|`` is written as a tensor product of single-qubit Pauli combinations,
and the exchange gate ``E(m, n)`` (the permutation sending ``|n⟩`` to ``|m⟩``)
is written as a product of neighbour transpositions ``E(j, j+1)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .operators import RegisterSpec, kron, ketbra

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


class YConvention(enum.Enum):
    """How the real ``Y`` in ``(X ± Y)/2`` relates to ``σ_y``.

    ``I_SIGMA_Y`` (``Y = iσ_y``) makes ``(X+Y)/2 = |0⟩⟨1|``, which is what the
    bit assignment needs. ``MINUS_I_SIGMA_Y`` (``Y = -iσ_y``, i.e. ``iY = σ_y``)
    swaps the two off-diagonal factors and so reproduces ``|n⟩⟨m|``-type
    entries on every qubit where the bits differ.
    """

    I_SIGMA_Y = "Y=i*sigma_y"
    MINUS_I_SIGMA_Y = "Y=-i*sigma_y"

    def y(self) -> np.ndarray:
        return 1j * SIGMA_Y if self is YConvention.I_SIGMA_Y else -1j * SIGMA_Y


DEFAULT_Y = YConvention.I_SIGMA_Y

# (alpha, beta) -> (label, coefficients of I, X, Y, Z), each factor halved
_FACTOR_TABLE = {
    (0, 0): ("(I+Z)/2", (1, 0, 0, 1)),
    (1, 1): ("(I-Z)/2", (1, 0, 0, -1)),
    (0, 1): ("(X+Y)/2", (0, 1, 1, 0)),
    (1, 0): ("(X-Y)/2", (0, 1, -1, 0)),
}


@dataclass(frozen=True)
class PauliFactor:
    qubit: int
    alpha: int
    beta: int
    convention: YConvention

    @property
    def label(self) -> str:
        return _FACTOR_TABLE[self.alpha, self.beta][0]

    def matrix(self) -> np.ndarray:
        ci, cx, cy, cz = _FACTOR_TABLE[self.alpha, self.beta][1]
        return (ci * I2 + cx * SIGMA_X + cy * self.convention.y() + cz * SIGMA_Z) / 2


@dataclass(frozen=True)
class PauliDecomposition:
    m: int
    n: int
    spec: RegisterSpec
    convention: YConvention
    factors: tuple[PauliFactor, ...]  # qubit 0 first
    matrix: np.ndarray

    @property
    def expression(self) -> str:
        return " ⊗ ".join(f.label for f in reversed(self.factors))

    @property
    def matches_outer_product(self) -> bool:
        return bool(np.array_equal(self.matrix, ketbra(self.m, self.n, self.spec.N)))


def pauli_decomposition(
    m: int, n: int, spec: RegisterSpec, convention: YConvention = DEFAULT_Y
) -> PauliDecomposition:
    """Tensor-product form of ``|m⟩⟨n|``; factor ``i`` is picked by bit ``i`` of ``m`` and ``n``."""
    spec.check_index(m, "m")
    spec.check_index(n, "n")
    factors = tuple(
        PauliFactor(i, spec.bit(m, i), spec.bit(n, i), convention) for i in range(spec.k)
    )
    out = np.ones((1, 1), dtype=complex)
    for f in reversed(factors):  # highest qubit is the leftmost tensor factor
        out = kron(out, f.matrix())
    return PauliDecomposition(m, n, spec, convention, factors, out)


@dataclass(frozen=True)
class ExchangeGate:
    """Permutation gate ``E(m, n)`` together with its neighbour-transposition factors.

    ``factors`` lists the neighbour pairs left to right, i.e. the last pair is
    applied first.
    """

    spec: RegisterSpec
    m: int
    n: int
    factors: tuple[tuple[int, int], ...]

    def permutation(self) -> np.ndarray:
        """``perm[j]`` = image of basis state ``j``."""
        perm = np.arange(self.spec.N)
        for a, b in reversed(self.factors):
            swap = perm == a
            perm[perm == b] = a
            perm[swap] = b
        return perm

    def matrix(self) -> np.ndarray:
        N = self.spec.N
        out = np.eye(N, dtype=complex)
        for a, b in self.factors:
            out = out @ neighbor_matrix(min(a, b), self.spec)
        return out


def neighbor_matrix(m: int, spec: RegisterSpec) -> np.ndarray:
    """``Σ_{j≠m,m+1} |j⟩⟨j| + |m⟩⟨m+1| + |m+1⟩⟨m|``."""
    if not 0 <= m < spec.N - 1:
        raise IndexError(f"neighbour exchange needs 0 <= m < N-1, got m={m} for N={spec.N}")
    out = np.eye(spec.N, dtype=complex)
    out[[m, m + 1], [m, m + 1]] = 0
    out[m, m + 1] = out[m + 1, m] = 1
    return out


def exchange_neighbor(m: int, spec: RegisterSpec) -> ExchangeGate:
    neighbor_matrix(m, spec)
    return ExchangeGate(spec, m, m + 1, ((m, m + 1),))


def exchange(m: int, n: int, spec: RegisterSpec) -> ExchangeGate:
    """``E(m, n)`` as an ordered product of neighbour exchanges.

    Factors are multiplied on the left as the running index grows, so the
    rightmost factor touches ``|n⟩`` first and the chain walks it to ``|m⟩``.
    """
    spec.check_index(m, "m")
    spec.check_index(n, "n")
    if n < m:
        steps = [(j + 1, j) for j in range(n, m)]
    elif n > m:
        steps = [(n - j - 1, n - j) for j in range(n - m)]
    else:
        steps = []
    return ExchangeGate(spec, m, n, tuple(reversed(steps)))


def exchange_direct(m: int, n: int, spec: RegisterSpec) -> np.ndarray:
    """Same permutation built directly as a cycle on the interval between ``n`` and ``m``."""
    spec.check_index(m, "m")
    spec.check_index(n, "n")
    perm = np.arange(spec.N)
    if n < m:
        perm[n] = m
        perm[n + 1 : m + 1] = np.arange(n, m)
    elif n > m:
        perm[n] = m
        perm[m:n] = np.arange(m + 1, n + 1)
    out = np.zeros((spec.N, spec.N), dtype=complex)
    out[perm, np.arange(spec.N)] = 1
    return out


def ketbra_via_exchange(m: int, n: int, spec: RegisterSpec) -> tuple[np.ndarray, np.ndarray]:
    """``(E(m,n)·|n⟩⟨n|, |m⟩⟨m|·E(m,n))``; both equal ``|m⟩⟨n|``."""
    e = exchange(m, n, spec).matrix()
    N = spec.N
    return e @ ketbra(n, n, N), ketbra(m, m, N) @ e

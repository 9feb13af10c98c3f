"""Realization cost model and structure-exploiting synthesis.

The default realization of ``U`` uses one element per nonzero entry. Passes
here detect structure (diagonal, tensor-product, symmetric, equal rows or
columns) and share parameters between branches with equal coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .elements import (
    Element,
    GroupedElement,
    Network,
    Primitive,
    Product,
    q_network,
)
from .operators import DEFAULT_TOL, RegisterSpec, as_matrix, kron

FACTOR_RANK_THRESHOLD = 1e-8


@dataclass(frozen=True)
class Flags:
    diagonal: bool = False
    tensor_factorizable: tuple[int, ...] = ()  # splits k1 that factor
    transpose_symmetric: bool = False
    row_equal: bool = False
    line_equal: bool = False

    def any(self) -> bool:
        return (
            self.diagonal
            or bool(self.tensor_factorizable)
            or self.transpose_symmetric
            or self.row_equal
            or self.line_equal
        )


@dataclass(frozen=True)
class RealizationReport:
    nonzero_count: int
    distinct_nonzero_count: int
    element_count: int
    parameter_count: int
    flags: Flags = field(default_factory=Flags)

    def render(self) -> str:
        """Stable ``key: value`` text block."""
        f = self.flags
        splits = ",".join(str(s) for s in f.tensor_factorizable) or "-"
        lines = [
            f"nonzero_count: {self.nonzero_count}",
            f"distinct_nonzero_count: {self.distinct_nonzero_count}",
            f"element_count: {self.element_count}",
            f"parameter_count: {self.parameter_count}",
            f"diagonal: {str(f.diagonal).lower()}",
            f"tensor_factorizable: {splits}",
            f"transpose_symmetric: {str(f.transpose_symmetric).lower()}",
            f"row_equal: {str(f.row_equal).lower()}",
            f"line_equal: {str(f.line_equal).lower()}",
        ]
        return "\n".join(lines) + "\n"


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    """Greedy grouping of values equal within ``tol``; order of first appearance."""
    groups: list[list[int]] = []
    reps: list[complex] = []
    for i, v in enumerate(values):
        for g, r in zip(groups, reps):
            if abs(v - r) < tol:
                g.append(i)
                break
        else:
            groups.append([i])
            reps.append(v)
    return groups


def grouped_network(u, spec: RegisterSpec | None = None, tol: float = DEFAULT_TOL) -> Network:
    """Realization with one shared parameter per set of equal nonzero coefficients.

    Branches whose coefficient is 1 become fixed branches and carry no parameter.
    Singleton groups stay plain Rotators/Transitors.
    """
    u = as_matrix(u, square=True)
    spec = spec or RegisterSpec.from_dim(u.shape[0])
    rows, cols = np.nonzero(u)
    values = u[rows, cols]
    unit = [i for i, v in enumerate(values) if abs(v - 1) < tol]
    free = [i for i in range(len(values)) if abs(values[i] - 1) >= tol]
    fixed = tuple((int(rows[i]), int(cols[i])) for i in unit)
    children = []
    for group in _cluster(values[free], tol):
        idx = [free[g] for g in group]
        coeff = complex(values[idx[0]])
        branches = tuple((int(rows[i]), int(cols[i])) for i in idx)
        if len(idx) > 1 or (fixed and not children):
            # fixed unit branches ride along with the first group
            extra = fixed if not children else ()
            children.append(Primitive(GroupedElement(branches, coeff, extra)))
        else:
            children.append(Primitive(Element.branch(*branches[0], coeff)))
    if fixed and not children:
        children = [Primitive(Element.branch(m, n, 1)) for m, n in fixed]
    return Network(spec, Product(tuple(children)))


def network_cost(net: Network) -> tuple[int, int]:
    """``(element_count, parameter_count)`` of a network.

    Element count is the number of Rotator/Transitor branches (a group counts
    every branch it drives); parameters are free coefficients: one per group,
    one per plain element whose coefficient is not 1.
    """
    elements = 0
    params = 0
    for e in net.primitives():
        if isinstance(e, GroupedElement):
            elements += len(e.branches())
            params += 1
        elif e.is_generator:
            elements += 1
            params += e.coeff != 1
    return elements, int(params)


def _is_diagonal(u: np.ndarray, tol: float) -> bool:
    off = u - np.diag(np.diag(u))
    return not off.size or float(np.max(np.abs(off))) < tol


def analyze(u, tol: float = DEFAULT_TOL) -> RealizationReport:
    u = as_matrix(u, square=True)
    spec = RegisterSpec.from_dim(u.shape[0])
    nz = u[u != 0]
    distinct = len(_cluster(nz, tol))
    elements, _ = network_cost(q_network(u, spec))
    _, params = network_cost(grouped_network(u, spec, tol))
    splits = tuple(k1 for k1 in range(1, spec.k) if tensor_factor(u, k1, tol) is not None)
    flags = Flags(
        diagonal=_is_diagonal(u, tol),
        tensor_factorizable=splits,
        transpose_symmetric=bool(np.max(np.abs(u - u.T)) < tol),
        row_equal=bool(np.max(np.abs(u - u[:, :1])) < tol),
        line_equal=bool(np.max(np.abs(u - u[:1, :])) < tol),
    )
    return RealizationReport(len(nz), distinct, elements, params, flags)


class NotDiagonalError(ValueError):
    def __init__(self, m: int, n: int, value: complex):
        super().__init__(f"entry ({m}, {n}) = {value} is off the diagonal")
        self.index = (m, n)


def diagonal_realization(u, spec: RegisterSpec | None = None, tol: float = DEFAULT_TOL) -> Network:
    """One Rotator per nonzero diagonal entry."""
    u = as_matrix(u, square=True)
    spec = spec or RegisterSpec.from_dim(u.shape[0])
    off = np.abs(u - np.diag(np.diag(u)))
    if off.size and off.max() >= tol:
        m, n = np.unravel_index(np.argmax(off), off.shape)
        raise NotDiagonalError(int(m), int(n), complex(u[m, n]))
    d = np.diag(u)
    children = tuple(Primitive(Element.rotator(m, d[m])) for m in np.nonzero(d)[0])
    return Network(spec, Product(children))


def rearrange(u: np.ndarray, n1: int, n2: int) -> np.ndarray:
    """Block rearrangement taking ``A ⊗ B`` to the rank-one ``vec(A) vec(B)^T``."""
    return u.reshape(n1, n2, n1, n2).transpose(0, 2, 1, 3).reshape(n1 * n1, n2 * n2)


def tensor_factor(u, k1: int, tol: float = DEFAULT_TOL):
    """Split ``u`` as ``v1 ⊗ v2`` with ``v1`` on the top ``k1`` qubits, or return ``None``.

    The scale is fixed so that the largest-magnitude entry of ``v1`` is 1.
    """
    u = as_matrix(u, square=True)
    spec = RegisterSpec.from_dim(u.shape[0])
    if not 1 <= k1 < spec.k:
        raise ValueError(f"split k1={k1} must satisfy 1 <= k1 < k={spec.k}")
    n1, n2 = 1 << k1, 1 << (spec.k - k1)
    r = rearrange(u, n1, n2)
    left, sv, right = np.linalg.svd(r)
    if sv[0] == 0:
        v1 = np.zeros((n1, n1), dtype=complex)
        v1[0, 0] = 1
        return v1, np.zeros((n2, n2), dtype=complex)
    if len(sv) > 1 and sv[1] > FACTOR_RANK_THRESHOLD * sv[0]:
        return None
    v1 = (left[:, 0] * sv[0]).reshape(n1, n1)
    v2 = right[0].reshape(n2, n2)
    pivot = v1.flat[np.argmax(np.abs(v1))]
    v1, v2 = v1 / pivot, v2 * pivot
    if np.max(np.abs(kron(v1, v2) - u)) >= tol * max(1.0, float(np.max(np.abs(u)))):
        return None
    return v1, v2


def conditional_rotation_matrix(i: int, phi: float, spec: RegisterSpec) -> np.ndarray:
    """``diag`` with ``e^{iφ}`` wherever qubit ``i`` of the basis label is 1."""
    if not 0 <= i < spec.k:
        raise IndexError(f"qubit {i} out of range for k={spec.k}")
    bits = (np.arange(spec.N) >> i) & 1
    return np.diag(np.where(bits == 1, np.exp(1j * phi), 1.0 + 0j))


def conditional_rotation(i: int, phi: float, spec: RegisterSpec) -> tuple[Network, RealizationReport]:
    """Phase on qubit ``i`` as one shared-parameter group plus fixed unit branches."""
    r = conditional_rotation_matrix(i, phi, spec)
    set_branches = tuple((m, m) for m in range(spec.N) if spec.bit(m, i))
    clear_branches = tuple((m, m) for m in range(spec.N) if not spec.bit(m, i))
    net = Network(
        spec,
        Product((Primitive(GroupedElement(set_branches, np.exp(1j * phi), clear_branches)),)),
    )
    elements, params = network_cost(net)
    base = analyze(r)
    report = RealizationReport(
        base.nonzero_count, base.distinct_nonzero_count, elements, params, base.flags
    )
    return net, report

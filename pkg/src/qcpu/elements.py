"""QCPU elements and the universal network ``Q(U)``.

Every Rotator/Transitor is ``exp(u |m⟩⟨n| ⊗ c†) = I + u |m⟩⟨n| ⊗ c†``: the
generator squares to zero because ``c†² = 0``, so the exponential series stops
after the linear term. Any two such generators also multiply to zero, which
is why the factors of ``Q(U)`` may be taken in any order and why a whole run
of them can be applied to a state in one scatter pass.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .operators import (
    AncillaOps,
    DimensionError,
    JointState,
    RegisterSpec,
    as_matrix,
    joint,
    kron,
)


class Kind(enum.Enum):
    ROTATOR = "Rotator"
    TRANSITOR = "Transitor"
    CONNECTOR = "Connector"
    CO_CONNECTOR = "CoConnector"
    DRAWER = "Drawer"


GENERATOR_KINDS = (Kind.ROTATOR, Kind.TRANSITOR)


@dataclass(frozen=True)
class Element:
    """One primitive. Use the classmethod constructors rather than the raw fields."""

    kind: Kind
    m: int | None = None
    n: int | None = None
    coeff: complex | None = None
    outcome: int | None = None

    def __post_init__(self):
        if self.kind in GENERATOR_KINDS:
            if self.m is None or self.n is None or self.coeff is None:
                raise ValueError(f"{self.kind.value} needs a branch and a coefficient")
            if self.m < 0 or self.n < 0:
                raise IndexError(f"negative branch index ({self.m}, {self.n})")
            if self.kind is Kind.TRANSITOR and self.m == self.n:
                raise ValueError("Transitor requires m ≠ n")
            if self.kind is Kind.ROTATOR and self.m != self.n:
                raise ValueError("Rotator acts on a single branch (m = n)")
            object.__setattr__(self, "coeff", complex(self.coeff))
        elif self.kind is Kind.DRAWER:
            if self.outcome not in (0, 1):
                raise ValueError(f"Drawer outcome must be 0 or 1, got {self.outcome!r}")

    @classmethod
    def rotator(cls, m: int, coeff: complex) -> "Element":
        return cls(Kind.ROTATOR, int(m), int(m), coeff)

    @classmethod
    def transitor(cls, m: int, n: int, coeff: complex) -> "Element":
        return cls(Kind.TRANSITOR, int(m), int(n), coeff)

    @classmethod
    def branch(cls, m: int, n: int, coeff: complex) -> "Element":
        """Rotator on the diagonal, Transitor elsewhere."""
        return cls.rotator(m, coeff) if m == n else cls.transitor(m, n, coeff)

    @classmethod
    def connector(cls) -> "Element":
        return cls(Kind.CONNECTOR)

    @classmethod
    def co_connector(cls) -> "Element":
        return cls(Kind.CO_CONNECTOR)

    @classmethod
    def drawer(cls, outcome: int = 1) -> "Element":
        return cls(Kind.DRAWER, outcome=outcome)

    @property
    def is_generator(self) -> bool:
        return self.kind in GENERATOR_KINDS

    def branches(self) -> tuple[tuple[int, int, complex], ...]:
        return ((self.m, self.n, self.coeff),) if self.is_generator else ()

    def max_index(self) -> int:
        return max(self.m, self.n) if self.is_generator else -1


@dataclass(frozen=True)
class GroupedElement:
    """Many branches driven by a single shared parameter.

    ``fixed`` branches carry coefficient 1 and are not counted as parameters.
    """

    branches_: tuple[tuple[int, int], ...]
    coeff: complex
    fixed: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        shared = tuple((int(m), int(n)) for m, n in self.branches_)
        fixed = tuple((int(m), int(n)) for m, n in self.fixed)
        both = shared + fixed
        if len(set(both)) != len(both):
            raise ValueError("grouped branches must be pairwise distinct")
        if any(m < 0 or n < 0 for m, n in both):
            raise IndexError("negative branch index in group")
        object.__setattr__(self, "branches_", shared)
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "coeff", complex(self.coeff))

    is_generator = True
    parameter_count = 1

    def branches(self) -> tuple[tuple[int, int, complex], ...]:
        return tuple((m, n, self.coeff) for m, n in self.branches_) + tuple(
            (m, n, 1 + 0j) for m, n in self.fixed
        )

    def max_index(self) -> int:
        return max((max(m, n) for m, n, _ in self.branches()), default=-1)


AnyElement = Union[Element, GroupedElement]


# -- expression tree ---------------------------------------------------------


class Node:
    """Base class of network expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Primitive(Node):
    element: AnyElement


@dataclass(frozen=True)
class Product(Node):
    """Ordered product; ``children[0]`` is the leftmost factor, applied last."""

    children: tuple[Node, ...]

    @cached_property
    def plan(self) -> tuple:
        """Right-to-left application steps with generator runs fused."""
        steps: list = []
        run: list[tuple[int, int, complex]] = []
        for child in reversed(self.children):
            if isinstance(child, Primitive) and child.element.is_generator:
                run.extend(child.element.branches())
                continue
            if run:
                steps.append(_fused_run(run))
                run = []
            steps.append(child)
        if run:
            steps.append(_fused_run(run))
        return tuple(steps)


@dataclass(frozen=True)
class IdentityPlusWrap(Node):
    """``I_R ⊗ I_A + inner``."""

    inner: Node


@dataclass(frozen=True)
class TwoRegister(Node):
    """``(I_R)_input ⊗ [inner]_out`` on the doubled register."""

    inner: Node


@dataclass(frozen=True, eq=False)
class _FusedRun:
    rows: np.ndarray
    cols: np.ndarray
    coeffs: np.ndarray


def _fused_run(branches: list[tuple[int, int, complex]]) -> _FusedRun:
    rows, cols, coeffs = zip(*branches)
    return _FusedRun(np.array(rows), np.array(cols), np.array(coeffs, dtype=complex))


@dataclass(frozen=True)
class Network:
    spec: RegisterSpec
    expr: Node

    def __post_init__(self):
        for node in walk(self.expr):
            if isinstance(node, Primitive) and node.element.max_index() >= self.spec.N:
                raise IndexError(
                    f"branch index {node.element.max_index()} out of range for k={self.spec.k}"
                )
            if isinstance(node, TwoRegister) and node is not self.expr:
                raise ValueError("a two-register embedding is only allowed at the top level")

    @property
    def is_two_register(self) -> bool:
        return isinstance(self.expr, TwoRegister)

    @property
    def dim(self) -> int:
        d = self.spec.joint_dim
        return self.spec.N * d if self.is_two_register else d

    def primitives(self) -> list[AnyElement]:
        return [node.element for node in walk(self.expr) if isinstance(node, Primitive)]

    def matrix(self) -> np.ndarray:
        return evaluate(self)

    def __matmul__(self, other: "Network") -> "Network":
        return product([self, other])


def walk(node: Node) -> Iterable[Node]:
    yield node
    if isinstance(node, Product):
        for child in node.children:
            yield from walk(child)
    elif isinstance(node, (IdentityPlusWrap, TwoRegister)):
        yield from walk(node.inner)


def primitive(element: AnyElement, spec: RegisterSpec) -> Network:
    return Network(spec, Primitive(element))


def product(nets: Sequence[Network]) -> Network:
    """Ordered product of networks sharing one register; the first is leftmost."""
    if not nets:
        raise ValueError("empty product")
    spec = nets[0].spec
    for net in nets[1:]:
        if net.spec != spec:
            raise DimensionError(f"register mismatch: k={spec.k} vs k={net.spec.k}")
    children: list[Node] = []
    for net in nets:
        if isinstance(net.expr, Product):
            children.extend(net.expr.children)
        else:
            children.append(net.expr)
    return Network(spec, Product(tuple(children)))


# -- dense evaluation ---------------------------------------------------------


def element_matrix(e: AnyElement, spec: RegisterSpec) -> np.ndarray:
    """Dense ``2N × 2N`` matrix of one element."""
    N = spec.N
    if e.max_index() >= N:
        raise IndexError(f"branch index {e.max_index()} out of range for k={spec.k}")
    if e.is_generator:
        out = np.eye(2 * N, dtype=complex)
        for m, n, u in e.branches():
            out[2 * m + 1, 2 * n] += u
        return out
    eye = np.eye(N, dtype=complex)
    if e.kind is Kind.CONNECTOR:
        return joint(eye, AncillaOps.c)
    if e.kind is Kind.CO_CONNECTOR:
        return joint(eye, AncillaOps.c_dag)
    return joint(eye, AncillaOps.projector(e.outcome))


def _evaluate_node(node: Node, spec: RegisterSpec) -> np.ndarray:
    if isinstance(node, Primitive):
        return element_matrix(node.element, spec)
    if isinstance(node, Product):
        out = np.eye(spec.joint_dim, dtype=complex)
        for child in node.children:
            if isinstance(child, Primitive) and child.element.is_generator:
                # right-multiplying by I + Σ u |2m+1⟩⟨2n| only touches columns 2n
                branches = child.element.branches()
                cols = [(2 * n, u * out[:, 2 * m + 1]) for m, n, u in branches]
                for col, delta in cols:
                    out[:, col] += delta
            else:
                out = out @ _evaluate_node(child, spec)
        return out
    if isinstance(node, IdentityPlusWrap):
        return np.eye(spec.joint_dim, dtype=complex) + _evaluate_node(node.inner, spec)
    if isinstance(node, TwoRegister):
        return kron(np.eye(spec.N, dtype=complex), _evaluate_node(node.inner, spec))
    raise TypeError(f"unknown node {node!r}")


def evaluate(net: Network) -> np.ndarray:
    """Dense matrix of a network. This is the ground truth for every identity."""
    return _evaluate_node(net.expr, net.spec)


# -- structured application ---------------------------------------------------


def _apply_node(node, s: np.ndarray) -> np.ndarray:
    # s has shape (batch, N, 2); last axis is the ancilla
    if isinstance(node, _FusedRun):
        out = s.copy()
        np.add.at(out[:, :, 1], (slice(None), node.rows), node.coeffs * s[:, node.cols, 0])
        return out
    if isinstance(node, Primitive):
        e = node.element
        if e.is_generator:
            return _apply_node(_fused_run(list(e.branches())), s)
        out = np.zeros_like(s)
        if e.kind is Kind.CONNECTOR:
            out[:, :, 0] = s[:, :, 1]
        elif e.kind is Kind.CO_CONNECTOR:
            out[:, :, 1] = s[:, :, 0]
        else:
            out[:, :, e.outcome] = s[:, :, e.outcome]
        return out
    if isinstance(node, Product):
        for step in node.plan:
            s = _apply_node(step, s)
        return s
    if isinstance(node, IdentityPlusWrap):
        return s + _apply_node(node.inner, s)
    raise TypeError(f"cannot apply node {node!r}")


def apply_array(net: Network, vec) -> np.ndarray:
    """Apply a network to a raw amplitude vector of length ``net.dim``."""
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    if vec.shape[0] != net.dim:
        raise DimensionError(f"state has {vec.shape[0]} amplitudes, network needs {net.dim}")
    N = net.spec.N
    if net.is_two_register:
        s = vec.reshape(N, N, 2)
        return _apply_node(net.expr.inner, s).reshape(-1)
    return _apply_node(net.expr, vec.reshape(1, N, 2)).reshape(-1)


def apply_steps(net: Network, vec) -> Iterator[tuple[object, np.ndarray]]:
    """Apply a network one top-level factor at a time, yielding ``(step, state)``.

    For a product (or a two-register product) the steps are its children from
    right to left, with adjacent Rotators/Transitors fused into one step.
    """
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    if vec.shape[0] != net.dim:
        raise DimensionError(f"state has {vec.shape[0]} amplitudes, network needs {net.dim}")
    N = net.spec.N
    node = net.expr.inner if net.is_two_register else net.expr
    s = vec.reshape(-1, N, 2)
    steps = node.plan if isinstance(node, Product) else (node,)
    for step in steps:
        s = _apply_node(step, s)
        yield step, s.reshape(-1)


def apply(net: Network, state):
    """Apply a network element by element, without forming its dense matrix.

    ``state`` may be a :class:`JointState` (returned as one) or a raw vector.
    """
    if isinstance(state, JointState):
        if state.spec != net.spec or net.is_two_register:
            raise DimensionError("joint state does not match the network register")
        return JointState(net.spec, apply_array(net, state.amplitudes))
    return apply_array(net, state)


# -- the universal network ----------------------------------------------------


def q_network(u, spec: RegisterSpec | None = None) -> Network:
    """``Q(U)``: one Rotator/Transitor per nonzero entry, row-major order.

    Exactly-zero entries are skipped since their factor is the identity.
    """
    u = as_matrix(u, square=True)
    spec = spec or RegisterSpec.from_dim(u.shape[0])
    if u.shape[0] != spec.N:
        raise DimensionError(f"matrix is {u.shape[0]}×{u.shape[0]}, register needs N={spec.N}")
    rows, cols = np.nonzero(u)
    children = tuple(Primitive(Element.branch(m, n, u[m, n])) for m, n in zip(rows, cols))
    return Network(spec, Product(children))


def identity_network(spec: RegisterSpec) -> Network:
    """The empty product, ``I_R ⊗ I_A``."""
    return Network(spec, Product(()))

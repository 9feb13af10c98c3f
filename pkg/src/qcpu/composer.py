"""Composition laws for QCPU networks.

* sum: ``Q(U1 + ... + Ur) = Q(U1) ... Q(Ur)``;
* product: ``Q(U1 ... Ur) = I + C† [C Q(U1)] ... [C Q(Ur)] C C†`` with the
  Connector ``C = I_R ⊗ |0⟩⟨1|`` handing each result to the next step;
* two-register product: the same bracket without the identity, embedded as
  ``I_input ⊗ [...]_out``;
* inverse: ``Q(U)^-1 = Q(-U)``;
* Drawer post-selection on the ancilla.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .elements import (
    Element,
    IdentityPlusWrap,
    Network,
    Node,
    Primitive,
    Product,
    TwoRegister,
    product,
    q_network,
)
from .operators import DimensionError, JointState, RegisterSpec, as_matrix


def _check_specs(nets: Sequence[Network]) -> RegisterSpec:
    if not nets:
        raise ValueError("at least one network is required")
    spec = nets[0].spec
    for net in nets:
        if net.spec != spec:
            raise DimensionError(f"register mismatch: k={spec.k} vs k={net.spec.k}")
        if net.is_two_register:
            raise ValueError("two-register networks cannot be composed further")
    return spec


def compose_sum(nets: Sequence[Network]) -> Network:
    """Concatenate networks; realizes the sum of their transformations."""
    _check_specs(nets)
    return product(nets)


def connector_chain(nets: Sequence[Network]) -> Node:
    """``C† · [C·Q1] · [C·Q2] ··· [C·Qr] · C · C†``, first network leftmost.

    Evaluates to ``(U1 U2 ... Ur) ⊗ c†`` when each ``Qj`` realizes ``Uj``.
    """
    con = Primitive(Element.connector())
    coc = Primitive(Element.co_connector())
    children: list[Node] = [coc]
    for net in nets:
        children.append(con)
        if isinstance(net.expr, Product):
            children.extend(net.expr.children)
        else:
            children.append(net.expr)
    children.extend([con, coc])
    return Product(tuple(children))


def compose_product(nets: Sequence[Network]) -> Network:
    """Network for ``U1 U2 ... Ur`` given networks for each ``Uj`` (in that order)."""
    spec = _check_specs(nets)
    return Network(spec, IdentityPlusWrap(connector_chain(nets)))


def two_register_compose(nets: Sequence[Network]) -> Network:
    """Full-multiplication form on an input register plus an output register.

    The result acts on ``N * 2N`` amplitudes ordered (input, out, ancilla).
    Starting from ``psi_in ⊗ psi ⊗ |0⟩`` it produces
    ``psi_in ⊗ (U1...Ur psi) ⊗ |1⟩``.
    """
    spec = _check_specs(nets)
    return Network(spec, TwoRegister(connector_chain(nets)))


def two_register_state(psi, spec: RegisterSpec | None = None, psi_input=None) -> np.ndarray:
    """Prepare ``psi_input ⊗ (psi ⊗ |0⟩_A)``; the input copy defaults to ``psi``.

    The copy is made classically by the caller; nothing here clones a quantum state.
    """
    out = JointState.prepare(psi, spec).amplitudes
    psi_in = np.asarray(psi if psi_input is None else psi_input, dtype=complex).reshape(-1)
    return np.kron(psi_in, out)


def inverse_network(u, spec: RegisterSpec | None = None) -> Network:
    """``Q^-1(U)``: every factor with its coefficient negated."""
    return q_network(-as_matrix(u, square=True), spec)


@dataclass(frozen=True)
class PostSelection:
    """Outcome of a Drawer measurement.

    ``state`` is the normalized register vector, or ``None`` when the outcome
    is impossible (``probability == 0``).
    """

    outcome: int
    probability: float
    state: np.ndarray | None

    @property
    def possible(self) -> bool:
        return self.state is not None


def drawer_postselect(s, outcome: int = 1, spec: RegisterSpec | None = None) -> PostSelection:
    """Project the ancilla onto ``outcome`` and renormalize the register.

    Probability is relative to the squared norm of the (unnormalized) input.
    """
    if outcome not in (0, 1):
        raise ValueError(f"ancilla outcome must be 0 or 1, got {outcome!r}")
    if not isinstance(s, JointState):
        amps = np.asarray(s, dtype=complex).reshape(-1)
        s = JointState(spec or RegisterSpec.from_dim(amps.shape[0] // 2), amps)
    total = float(np.vdot(s.amplitudes, s.amplitudes).real)
    if total == 0.0:
        raise ValueError("cannot post-select the zero state")
    part = s.ancilla_component(outcome)
    weight = float(np.vdot(part, part).real)
    if weight == 0.0:
        return PostSelection(outcome, 0.0, None)
    return PostSelection(outcome, weight / total, part / np.sqrt(weight))

"""Universal quantum network (QCPU) construction, composition and simulation."""

__version__ = "0.1.0"

from .operators import (  # noqa: E402
    AncillaOps,
    JointState,
    RegisterSpec,
    closed_form,
    dft_matrix,
    expm_oracle,
    kron,
)
from .elements import (  # noqa: E402
    Element,
    GroupedElement,
    Network,
    apply,
    element_matrix,
    evaluate,
    q_network,
)
from .composer import (  # noqa: E402
    compose_product,
    compose_sum,
    drawer_postselect,
    inverse_network,
    two_register_compose,
)
from .synthesis import exchange, exchange_neighbor, ketbra_via_exchange, pauli_decomposition  # noqa: E402
from .optimizer import analyze, conditional_rotation, diagonal_realization, tensor_factor  # noqa: E402
from .applications import (  # noqa: E402
    EvolutionSpec,
    QftConvention,
    evolution_step_network,
    evolve,
    qft_matrix,
    qft_network,
)
from .formats import emit_netlist, parse_netlist  # noqa: E402

__all__ = [
    "AncillaOps",
    "Element",
    "EvolutionSpec",
    "GroupedElement",
    "JointState",
    "Network",
    "QftConvention",
    "RegisterSpec",
    "analyze",
    "apply",
    "closed_form",
    "compose_product",
    "compose_sum",
    "conditional_rotation",
    "dft_matrix",
    "diagonal_realization",
    "drawer_postselect",
    "element_matrix",
    "emit_netlist",
    "evaluate",
    "evolution_step_network",
    "evolve",
    "exchange",
    "exchange_neighbor",
    "expm_oracle",
    "inverse_network",
    "ketbra_via_exchange",
    "kron",
    "parse_netlist",
    "pauli_decomposition",
    "q_network",
    "qft_matrix",
    "qft_network",
    "tensor_factor",
    "two_register_compose",
]

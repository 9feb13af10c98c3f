import numpy as np
import pytest

from qcpu.operators import RegisterSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def cmat(rng, dim, scale=1.0):
    return scale * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))


def cvec(rng, dim):
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def spec(k):
    return RegisterSpec(k)


def dense_factor_product(u, order):
    """Oracle for Q(U): multiply expm(U_mn |m><n| ⊗ c†) factors in the given order."""
    from qcpu.operators import expm_oracle, ketbra, raise_ancilla

    N = u.shape[0]
    out = np.eye(2 * N, dtype=complex)
    for m, n in order:
        out = out @ expm_oracle(raise_ancilla(u[m, n] * ketbra(m, n, N)))
    return out


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_acceptance():
    def record(number, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)

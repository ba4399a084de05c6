import numpy as np
import pytest

from synsched import codes
from synsched.codes import StabilizerCode
from synsched.pauli import PauliString


@pytest.fixture(scope="session")
def steane():
    return codes.load_fixture("steane")


@pytest.fixture(scope="session")
def surface_d3():
    return codes.load_fixture("surface_d3")


@pytest.fixture(scope="session")
def surface_d5():
    return codes.load_fixture("surface_d5")


@pytest.fixture(scope="session")
def color666_d5():
    return codes.load_fixture("color666_d5")


@pytest.fixture(scope="session")
def color488_d5():
    return codes.load_fixture("color488_d5")


@pytest.fixture(scope="session")
def xzzx_d3():
    return codes.load_fixture("xzzx_d3")


def make_zzzz_toy() -> StabilizerCode:
    """Single ZZZZ stabilizer on 4 qubits ([[4,3,1]] toy).

    Logical pairs: Xbar_i = X0 Xi, Zbar_i = Zi for i in 1..3.
    """
    code = StabilizerCode(
        family="zzzz_toy", n=4, k=3, d=1,
        stabilizers=[PauliString.from_string("ZZZZ")],
        logical_xs=[PauliString.from_string(s) for s in ("XXII", "XIXI", "XIIX")],
        logical_zs=[PauliString.from_string(s) for s in ("IZII", "IIZI", "IIIZ")],
        x_count=0,
    )
    codes.validate_code(code)
    return code


@pytest.fixture(scope="session")
def zzzz_toy():
    return make_zzzz_toy()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import numpy as np
import pytest

from ssbfsk import (CpmScheme, GAUSSIAN, LORENTZIAN, PulseSpec, lorentzian_pulse,
                    make_pulse)


def lorentzian_scheme(M, h, L, w, sps=64):
    return CpmScheme(M=M, h=h, pulse=lorentzian_pulse(PulseSpec(LORENTZIAN, L=L, w=w), sps))


@pytest.fixture(scope="session")
def config_a():
    return lorentzian_scheme(2, 0.78, 5, 1.3)


@pytest.fixture(scope="session")
def config_b():
    return lorentzian_scheme(2, 0.65, 5, 1.2)


@pytest.fixture(scope="session")
def config_a_prime():
    return lorentzian_scheme(2, 1.04, 12, 0.8)


@pytest.fixture(scope="session")
def gmsk_scheme():
    return CpmScheme(M=2, h=0.5, pulse=make_pulse(PulseSpec(GAUSSIAN, L=4, bt=0.3), 64))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

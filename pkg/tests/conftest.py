import numpy as np
import pytest

from erasim.core import SystemParams, table_defaults, validate


@pytest.fixture
def device_params() -> SystemParams:
    """Representative matched-point device parameters (drive calibrated to
    SNR 16.1 over a 480 ns integration)."""
    params = table_defaults()
    assert validate(params).ok
    return params


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)


def random_valid_params(gen: np.random.Generator) -> SystemParams:
    """Draw a random parameter set satisfying every core invariant."""
    two_pi = 2 * np.pi
    kappa = two_pi * gen.uniform(2e6, 30e6)
    chi = two_pi * gen.uniform(0.5e6, 20e6) * gen.choice([-1, 1])
    return SystemParams(
        chi=chi,
        chi_dr=chi * gen.uniform(-0.05, 0.05),
        chi_dr_2=two_pi * gen.uniform(-2e3, 2e3),
        kappa_gg=kappa,
        kappa_logical=kappa * gen.uniform(0.7, 1.0),
        eta_eff=gen.uniform(0.05, 0.5),
        drive_amp=two_pi * gen.uniform(1e6, 20e6),
        drive_detuning=two_pi * gen.uniform(-20e6, 20e6),
        t_erasure_0l=gen.uniform(5e-6, 50e-6),
        t_erasure_1l=gen.uniform(5e-6, 50e-6),
        readout_degradation=gen.uniform(1.0, 3.0),
        t_heat=gen.uniform(1e-3, 20e-3),
        mist_prob_per_check=0.0,
        dr_gap=two_pi * gen.uniform(50e6, 150e6),
    )

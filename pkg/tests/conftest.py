import numpy as np
import pytest

from seisfault.volume import FaultSpec, SyntheticSpec, VolumeHeader, generate_synthetic


@pytest.fixture(scope="session")
def single_fault_spec():
    return SyntheticSpec(
        header=VolumeHeader(n_time=48, n_inline=64, n_crossline=64),
        layer_count=10,
        layer_seed=7,
        faults=(FaultSpec(strike_deg=90.0, dip_deg=90.0, throw=4, x0=32.0, y0=32.0),),
        noise_ratio=0.0,
        seed=3,
    )


@pytest.fixture(scope="session")
def single_fault_volume(single_fault_spec):
    return generate_synthetic(single_fault_spec)


@pytest.fixture(scope="session")
def noisy_fault_volume():
    spec = SyntheticSpec(
        header=VolumeHeader(n_time=48, n_inline=64, n_crossline=64),
        layer_count=10,
        layer_seed=7,
        faults=(FaultSpec(strike_deg=80.0, dip_deg=85.0, throw=4, x0=30.0, y0=32.0),),
        noise_ratio=0.1,
        seed=3,
    )
    return generate_synthetic(spec)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)

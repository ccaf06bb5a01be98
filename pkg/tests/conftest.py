import pytest

from ferromu import FrequencyGrid, PlateProperties, SensorGeometry


@pytest.fixture(autouse=True)
def _isolate_quad_env(monkeypatch):
    # quadrature budget must come from the test, not the ambient environment
    monkeypatch.delenv("FERRO_QUAD_NODES", raising=False)


@pytest.fixture(scope="session")
def bench_geometry():
    """The reference sensor: 32/34 mm diameters, 10.5 mm coils, 15.5 mm gap."""
    return SensorGeometry(
        r1=0.016, r2=0.017, height=0.0105, gap=0.0155, n_turns=30, lift_off=0.8e-3
    )


@pytest.fixture(scope="session")
def dp600():
    return PlateProperties(conductivity=4.13e6, relative_permeability=222.0, thickness=7e-3)


@pytest.fixture(scope="session")
def dp800():
    return PlateProperties(conductivity=3.81e6, relative_permeability=144.0, thickness=7e-3)


@pytest.fixture(scope="session")
def dp1000():
    return PlateProperties(conductivity=3.80e6, relative_permeability=122.0, thickness=7e-3)


@pytest.fixture(scope="session")
def bench_grid():
    """120 log-spaced points, 310 Hz to 3 MHz."""
    return FrequencyGrid.log_spaced(310.0, 3.0e6, 120)

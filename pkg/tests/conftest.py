import math

import pytest

from diraclab import make_model
from diraclab.operators import (
    assemble_dirac_schrodinger,
    assemble_hypersurface_dirac,
    assemble_intrinsic_dirac,
    eigensolve,
)


@pytest.fixture(scope="session")
def circle():
    return make_model("circle", {"radius": 1.0}, 64)


@pytest.fixture(scope="session")
def ellipse():
    return make_model("ellipse", {"a": 2.0, "b": 1.0}, 128)


@pytest.fixture(scope="session")
def sphere():
    return make_model("sphere2", {"radius": 1.0}, 12)


@pytest.fixture(scope="session")
def geodesic_pi3():
    return make_model("geodesic_sphere_s3", {"rho": math.pi / 3}, 10)


@pytest.fixture(scope="session")
def torus():
    return make_model("flat_torus2", {}, 16)


@pytest.fixture(scope="session")
def conformal_torus():
    return make_model("conformal_torus2", {}, 24)


@pytest.fixture(scope="session")
def circle_dirac(circle):
    return eigensolve(assemble_intrinsic_dirac(circle), 8)


@pytest.fixture(scope="session")
def circle_shifted(circle):
    return eigensolve(assemble_hypersurface_dirac(circle), 10)


@pytest.fixture(scope="session")
def sphere_dirac(sphere):
    return eigensolve(assemble_intrinsic_dirac(sphere), 24)


@pytest.fixture(scope="session")
def sphere_shifted(sphere):
    return eigensolve(assemble_hypersurface_dirac(sphere), 12)


@pytest.fixture(scope="session")
def torus_dirac(torus):
    return eigensolve(assemble_intrinsic_dirac(torus), 12)


@pytest.fixture(scope="session")
def torus_potential(torus):
    return eigensolve(assemble_dirac_schrodinger(torus, 1.0), 24)

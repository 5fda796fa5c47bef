import pytest

from adjoint_cauchy import AnnulusSpec, FemBackend, generate_mesh

R_INNER = 1.0
R_OUTER = 3.0


@pytest.fixture(scope="session")
def default_mesh():
    """The default experiment resolution; shared because assembly is the slow part."""
    return generate_mesh(AnnulusSpec(R_INNER, R_OUTER, 27, 160))


@pytest.fixture(scope="session")
def fem_default(default_mesh):
    return FemBackend(default_mesh)

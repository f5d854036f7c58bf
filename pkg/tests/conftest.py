import numpy as np
import pytest

import surfaug as sa


@pytest.fixture(scope="session")
def tetra():
    return sa.tetrahedron()


@pytest.fixture(scope="session")
def ico2():
    return sa.icosphere(2)


@pytest.fixture(scope="session")
def ico3():
    return sa.icosphere(3)


@pytest.fixture(scope="session")
def op_tetra(tetra):
    op = sa.assemble(tetra)
    sa.spectral_radius(op)
    return op


@pytest.fixture(scope="session")
def op_ico2(ico2):
    op = sa.assemble(ico2)
    sa.spectral_radius(op)
    return op


@pytest.fixture(scope="session")
def opn_ico2(op_ico2):
    return sa.normalize(op_ico2)


@pytest.fixture(scope="session")
def basis_ico2(op_ico2):
    return sa.eigendecompose(op_ico2, op_ico2.num_vertices)


@pytest.fixture(scope="session")
def op_ico3(ico3):
    op = sa.assemble(ico3)
    sa.spectral_radius(op)
    return op


@pytest.fixture(scope="session")
def basis_ico3(op_ico3):
    return sa.eigendecompose(op_ico3, op_ico3.num_vertices)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240901)

"""Shared fixtures: domains, meshes and assembled systems reused across tests."""

import time

import numpy as np
import pytest

from freqdecay import fem, spectral
from freqdecay.coefficients import constant_scalar, constant_tensor
from freqdecay.geometry import build_domain
from freqdecay.meshing import build_mesh


@pytest.fixture(scope="session")
def disk():
    return build_domain("disk", [1.0])


@pytest.fixture(scope="session")
def ellipse():
    return build_domain("ellipse", [2.0, 1.0])


@pytest.fixture(scope="session")
def euclid_fields():
    return constant_scalar(1.0), constant_tensor(1.0, 0.0, 1.0)


@pytest.fixture(scope="session")
def disk_coarse(disk, euclid_fields):
    """h = 0.05 disk bundle for cheap module tests."""
    mesh = build_mesh(disk, 0.05)
    mats = fem.assemble(mesh, *euclid_fields)
    return mesh, mats


@pytest.fixture(scope="session")
def disk_fine(disk, euclid_fields):
    """h = 0.02 disk bundle with DtN and Steklov basis; build time recorded."""
    t0 = time.perf_counter()
    mesh = build_mesh(disk, 0.02)
    mats = fem.assemble(mesh, *euclid_fields)
    dtn = spectral.dtn_matrix(mats)
    basis = spectral.steklov_basis(dtn, mats.B_e_bb, 120, tag="euclid")
    seconds = time.perf_counter() - t0
    return {"mesh": mesh, "mats": mats, "dtn": dtn, "basis": basis,
            "seconds": seconds}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)

import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from defectkit.core import Crystal, Lattice
from defectkit.fixture import fixture_path
from defectkit.io.volumetric import VolumetricGrid
from defectkit.io.wavefunction import KBlock, WavefunctionSet


@pytest.fixture
def hbn_manifest_path(tmp_path):
    """Writable copy of the shipped hBN fixture manifest."""
    dst = tmp_path / "hbn.json"
    shutil.copyfile(str(fixture_path()), dst)
    return dst


@pytest.fixture
def hbn_manifest_data():
    return json.loads(Path(str(fixture_path())).read_text())


def cubic_grid(L, n, values_fn):
    """VolumetricGrid on a cubic cell; ``values_fn(x, y, z)`` gets Cartesian arrays."""
    lat = Lattice.cubic(L)
    ax = np.arange(n) / n * L
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    crystal = Crystal(lat, ("B",), [[0.0, 0.0, 0.0]])
    return VolumetricGrid(crystal, values_fn(X, Y, Z))


def gaussian_pair_orbitals(L, n, d, alpha, axis=2):
    """Two normalized Gaussians a distance ``d`` apart along ``axis``, centred in the cell."""
    ax = np.arange(n) / n * L
    grids = np.meshgrid(ax, ax, ax, indexing="ij")
    c = L / 2
    dv = L**3 / n**3
    out = []
    for sign in (-1, 1):
        r2 = 0.0
        for i, g in enumerate(grids):
            centre = c + (sign * d / 2 if i == axis else 0.0)
            r2 = r2 + (g - centre) ** 2
        psi = np.exp(-alpha * r2 / 2)
        out.append(psi / np.sqrt(np.sum(psi * psi) * dv))
    return np.stack(out)


def random_wavefunctions(rng, n_spin=1, n_k=2, n_bands=3, n_pw=7, L=5.0):
    """Normalized random PWC1 data whose plane waves respect the cutoff."""
    lat = Lattice.cubic(L)
    gv = np.array(
        [g for g in np.ndindex(3, 3, 3)], dtype=np.int32
    ) - 1
    gv = gv[np.argsort(np.sum(gv * gv, axis=1), kind="stable")][:n_pw]
    blocks = []
    for _ in range(n_spin):
        ks = []
        weights = rng.random(n_k)
        weights /= weights.sum()
        weights[-1] = 1.0 - np.sum(weights[:-1])
        for k in range(n_k):
            c = rng.normal(size=(n_bands, n_pw)) + 1j * rng.normal(size=(n_bands, n_pw))
            c /= np.linalg.norm(c, axis=1, keepdims=True)
            eig = np.sort(rng.normal(size=n_bands)) + np.arange(n_bands)
            occ = (np.arange(n_bands) < n_bands // 2).astype(float)
            ks.append(KBlock(rng.random(3) * 0.5, float(weights[k]), gv.copy(), eig, occ, c))
        blocks.append(tuple(ks))
    wfs = WavefunctionSet(lat, 200.0, tuple(blocks))
    return wfs.validate()

import numpy as np
import pytest

from defectkit.core import Crystal, Lattice
from defectkit.errors import GridMismatch, InvalidTensor, SpinTooLow
from defectkit.io.volumetric import VolumetricGrid
from defectkit.spin import OrbitalPairSet, zfs_parameters, zfs_tensor, zfs_tensor_direct
from defectkit.spin.zfs import ZFS_PREFACTOR_GHZ_A3

from conftest import gaussian_pair_orbitals


def pair(L, n, d, alpha, axis=2, spins=(1, 1)):
    return OrbitalPairSet(Lattice.cubic(L), gaussian_pair_orbitals(L, n, d, alpha, axis), spins)


def test_prefactor():
    assert ZFS_PREFACTOR_GHZ_A3 == pytest.approx(52.041, abs=1e-3)


def test_fft_matches_direct_real_space():
    p = pair(6.0, 12, 2.0, 3.0)
    a, b = zfs_tensor(p), zfs_tensor_direct(p)
    assert np.allclose(a.D_ab, b.D_ab, rtol=0, atol=1e-6 * np.max(np.abs(a.D_ab)))
    assert a.D == pytest.approx(b.D, rel=1e-6)


def test_fft_matches_direct_random_orbitals():
    rng = np.random.default_rng(5)
    orbs = rng.normal(size=(3, 8, 8, 8))
    lat = Lattice(np.diag([5.0, 6.0, 7.0]))
    dv = lat.volume / 512
    orbs /= np.sqrt(np.sum(orbs**2, axis=(1, 2, 3), keepdims=True) * dv)
    p = OrbitalPairSet(lat, orbs, (1, 1, -1), S=1.0)
    assert np.allclose(zfs_tensor(p).D_ab, zfs_tensor_direct(p).D_ab, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("d,L,n,alpha", [(10.0, 80.0, 112, 1.0), (2.0, 24.0, 128, 6.0)])
def test_two_point_limit(d, L, n, alpha):
    t = zfs_tensor(pair(L, n, d, alpha))
    want = ZFS_PREFACTOR_GHZ_A3 / d**3
    assert t.D == pytest.approx(-1.5 * want, rel=1e-3)
    assert np.diag(t.D_ab) == pytest.approx([0.5 * want, 0.5 * want, -want], rel=1e-3)
    assert abs(t.E) < 1e-3 * abs(t.D)
    assert abs(t.axes[2, 2]) == pytest.approx(1.0, abs=1e-9)


def test_rotation_invariance():
    a = zfs_tensor(pair(24.0, 64, 3.0, 4.0, axis=2))
    b = zfs_tensor(pair(24.0, 64, 3.0, 4.0, axis=0))
    assert b.D == pytest.approx(a.D, rel=1e-9)
    assert abs(b.axes[0, 2]) == pytest.approx(1.0, abs=1e-9)


def test_antiparallel_pair_has_no_exchange():
    # opposite spins: chi = -1, direct term only; same geometry flips the sign
    up = zfs_tensor(pair(24.0, 64, 3.0, 4.0)).D_ab
    orbs = gaussian_pair_orbitals(24.0, 64, 3.0, 4.0)
    p = OrbitalPairSet(Lattice.cubic(24.0), orbs, (1, -1), S=1.0)
    down = zfs_tensor(p).D_ab
    # for well-separated orbitals exchange is negligible
    assert np.allclose(down, -up, rtol=1e-6, atol=1e-9)


def test_random_tensors_obey_rhombicity_bound():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        a = rng.normal(size=(3, 3)) * rng.uniform(0.01, 100)
        m = a + a.T
        m -= np.trace(m) / 3 * np.eye(3)
        D, E, axes = zfs_parameters(m)
        assert abs(E) <= abs(D) / 3 + 1e-12 * abs(D)
        assert np.sign(E) in (0.0, np.sign(D))
        assert np.linalg.det(axes) == pytest.approx(1.0)
        rebuilt = axes @ np.diag([-D / 3 + E, -D / 3 - E, 2 * D / 3]) @ axes.T
        assert np.allclose(rebuilt, m, atol=1e-9 * np.max(np.abs(m)))


def test_zero_tensor():
    D, E, axes = zfs_parameters(np.zeros((3, 3)))
    assert D == 0.0 and E == 0.0 and np.array_equal(axes, np.eye(3))


def test_errors():
    with pytest.raises(SpinTooLow):
        zfs_tensor(pair(6.0, 8, 2.0, 3.0, spins=(1, -1)))
    with pytest.raises(InvalidTensor):
        zfs_parameters(np.eye(2))
    with pytest.raises(InvalidTensor):
        zfs_parameters([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(InvalidTensor):
        zfs_parameters(np.full((3, 3), np.nan))
    with pytest.raises(GridMismatch):
        zfs_tensor_direct(pair(6.0, 20, 2.0, 3.0))
    with pytest.raises(GridMismatch):
        OrbitalPairSet(Lattice.cubic(5.0), np.zeros((2, 4, 4, 4)), (1,))
    cry = Crystal(Lattice.cubic(5.0), ("B",), [[0, 0, 0]])
    cry2 = Crystal(Lattice.cubic(6.0), ("B",), [[0, 0, 0]])
    with pytest.raises(GridMismatch):
        OrbitalPairSet.from_grids([VolumetricGrid(cry, np.zeros((4, 4, 4))), VolumetricGrid(cry, np.zeros((4, 4, 5)))], (1, 1))
    with pytest.raises(GridMismatch):
        OrbitalPairSet.from_grids([VolumetricGrid(cry, np.zeros((4, 4, 4))), VolumetricGrid(cry2, np.zeros((4, 4, 4)))], (1, 1))

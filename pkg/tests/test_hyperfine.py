import math

import numpy as np
import pytest

from defectkit.errors import MissingGrid, NoUnpairedSpin
from defectkit.io.volumetric import VolumetricGrid
from defectkit.spin import NucleusSpec, dipole_dipole_tensor, fermi_contact, hyperfine_tensor, isotope_data
from defectkit.spin.hyperfine import R_CUT, hyperfine_prefactor

from conftest import cubic_grid


def gaussian_density(L, n, centre, beta, total=1.0):
    def f(X, Y, Z):
        r2 = (X - centre[0]) ** 2 + (Y - centre[1]) ** 2 + (Z - centre[2]) ** 2
        return total * (beta / math.pi) ** 1.5 * np.exp(-beta * r2)

    return cubic_grid(L, n, f)


def test_contact_matches_closed_form():
    L, n, beta = 12.0, 96, 2.0
    c = L / 2  # on a grid point
    grid = gaussian_density(L, n, (c, c, c), beta)
    want = 8 * math.pi / 3 * (beta / math.pi) ** 1.5
    assert fermi_contact(grid, (0.5, 0.5, 0.5)) == pytest.approx(want, rel=1e-3)
    assert grid.integrate() == pytest.approx(1.0, rel=1e-6)
    hf = hyperfine_tensor(0.5, NucleusSpec((0.5, 0.5, 0.5), "14N"), grid)
    pref = hyperfine_prefactor(isotope_data("14N")[0], 0.5)
    assert hf.a_iso == pytest.approx(pref * want, rel=1e-3)
    # spherical density: dipolar part vanishes
    assert np.allclose(hf.principal, hf.a_iso, rtol=1e-6)


def test_point_dipole_ratios():
    L, n, d = 20.0, 64, 5.0
    c = L / 2
    grid = gaussian_density(L, n, (c, c, c + d), beta=4.0)
    W = dipole_dipole_tensor(grid, (0.5, 0.5, 0.5))
    ratios = np.diag(W) * d**3
    assert ratios == pytest.approx([-1.0, -1.0, 2.0], rel=1e-2)
    assert np.max(np.abs(W - np.diag(np.diag(W)))) < 1e-6 / d**3


def triple_loop_W(grid, R, r_cut=R_CUT):
    """Scalar oracle: same per-point arithmetic as the vectorised code."""
    n1, n2, n3 = grid.dims
    A = grid.lattice.vectors
    terms = [[[] for _ in range(3)] for _ in range(3)]
    for i in range(n1):
        for j in range(n2):
            for k in range(n3):
                f1 = i / n1 - R[0]
                f2 = j / n2 - R[1]
                f3 = k / n3 - R[2]
                f1, f2, f3 = f1 - np.round(f1), f2 - np.round(f2), f3 - np.round(f3)
                v = [f1 * A[0, a] + f2 * A[1, a] + f3 * A[2, a] for a in range(3)]
                r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
                if r2 < r_cut * r_cut:
                    continue
                r = math.sqrt(r2)
                r5, r3 = r2 * r2 * r, r2 * r
                s = grid.values[i, j, k]
                for a in range(3):
                    for b in range(a, 3):
                        t = 3.0 * v[a] * v[b] / r5
                        if a == b:
                            t = t - 1.0 / r3
                        terms[a][b].append(float(t * s))
    W = np.zeros((3, 3))
    for a in range(3):
        for b in range(a, 3):
            W[a, b] = W[b, a] = math.fsum(terms[a][b]) * grid.voxel_volume
    return W


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_dipolar_matches_triple_loop_bitwise(seed):
    rng = np.random.default_rng(seed)
    grid = cubic_grid(4.0, 8, lambda X, Y, Z: rng.normal(size=X.shape))
    R = tuple(rng.random(3))
    assert np.array_equal(dipole_dipole_tensor(grid, R), triple_loop_W(grid, R))


def test_dipolar_is_traceless():
    rng = np.random.default_rng(3)
    grid = cubic_grid(6.0, 16, lambda X, Y, Z: rng.random(X.shape))
    W = dipole_dipole_tensor(grid, (0.3, 0.1, 0.7))
    assert abs(np.trace(W)) < 1e-9 * np.max(np.abs(W))


def test_rotation_covariance():
    # 90 degree rotation about z: (x, y, z) -> (-y, x, z)
    L, n = 10.0, 32
    c = L / 2
    grid = gaussian_density(L, n, (c + 2.0, c - 1.0, c + 3.0), beta=3.0)
    # index map for the rotated density: rho'(r) = rho(R^-1 r)
    v = grid.values
    rv = np.empty_like(v)
    idx = np.arange(n)
    for i in idx:
        for j in idx:
            # R^-1 (x, y) = (y, -x) about the centre c (on a grid point)
            src_i = (j - n // 2) + n // 2
            src_j = -(i - n // 2) + n // 2
            rv[i, j, :] = v[src_i % n, src_j % n, :]
    rot = VolumetricGrid(grid.crystal, rv)
    R = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    A = hyperfine_tensor(0.5, NucleusSpec((0.5, 0.5, 0.5), "11B"), grid).A
    B = hyperfine_tensor(0.5, NucleusSpec((0.5, 0.5, 0.5), "11B"), rot).A
    assert np.allclose(B, R @ A @ R.T, atol=1e-9 * np.max(np.abs(A)))


def test_sign_follows_gamma():
    L, n = 8.0, 32
    grid = gaussian_density(L, n, (4.0, 4.0, 4.0), beta=2.0)
    n14 = hyperfine_tensor(0.5, NucleusSpec((0.5, 0.5, 0.5), "14N"), grid)
    n15 = hyperfine_tensor(0.5, NucleusSpec((0.5, 0.5, 0.5), "15N"), grid)
    assert n14.a_iso > 0 > n15.a_iso
    assert n15.a_iso / n14.a_iso == pytest.approx(-4.3173 / 3.0777)


def test_errors_and_warnings():
    grid = gaussian_density(8.0, 16, (4.0, 4.0, 4.0), beta=2.0)
    nuc = NucleusSpec((0.5, 0.5, 0.5), "14N")
    with pytest.raises(NoUnpairedSpin):
        hyperfine_tensor(0.0, nuc, grid)
    with pytest.raises(MissingGrid):
        hyperfine_tensor(0.5, nuc, None)
    with pytest.raises(KeyError):
        NucleusSpec((0, 0, 0), "99Xx")
    with pytest.warns(UserWarning, match="integrates"):
        hyperfine_tensor(1.0, nuc, grid)

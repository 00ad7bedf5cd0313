import math

import numpy as np
import pytest

from qesf import bae, catalog
from qesf.errors import CollisionError
from qesf.model import ModelSpec, Singularity
from qesf.poly import Poly, hermite_zeros, laguerre_zeros


def harmonic(b=1.0, N=1):
    return ModelSpec(Poly([1.0]), Poly([0.0, b]), (), N)


def sextic(a=1.0, b=0.0, N=1):
    return ModelSpec(Poly([0.0, 4.0]), Poly([0.0, 2 * b, 2 * a]), (), N)


def test_residual_examples():
    assert np.allclose(bae.residual(harmonic(N=1), [0.0]), [0.0])
    w = [-1 / math.sqrt(2), 1 / math.sqrt(2)]
    assert np.max(np.abs(bae.residual(harmonic(N=2), w))) < 1e-14
    assert np.max(np.abs(bae.residual(sextic(N=1), [1 / math.sqrt(2)]))) < 1e-14
    assert bae.residual(harmonic(N=0), []).size == 0


def test_residual_hermite_zeros_solve_harmonic():
    for n in range(1, 9):
        w = hermite_zeros(n)
        assert np.max(np.abs(bae.residual(harmonic(N=n), w))) < 1e-12


def test_residual_laguerre_zeros_solve_morse_p():
    A, alpha = 5.0, 1.0
    for n in (1, 2, 3, 4):
        spec = catalog.instantiate("morse-p", N=n)
        w = laguerre_zeros(n, 2 * A / alpha - 2 * n)
        assert np.max(np.abs(bae.residual(spec, w))) < 1e-10


def test_residual_collision_error():
    with pytest.raises(CollisionError):
        bae.residual(harmonic(N=2), [0.5, 0.5 + 1e-12])
    spec = catalog.instantiate("morse-p", N=1)
    with pytest.raises(CollisionError):
        bae.residual(spec, [1e-12])


def test_jacobian_against_finite_differences():
    rng = np.random.default_rng(19)
    specs = [harmonic(N=3), sextic(N=2), catalog.instantiate("morse-p", N=3),
             catalog.instantiate("trig-interval", N=2)]
    checked = 0
    while checked < 20:
        spec = specs[rng.integers(len(specs))]
        roots = np.sort(rng.uniform(0.5, 4.0, spec.N) * rng.choice([-1, 1], spec.N))
        if np.min(np.diff(np.sort(roots)), initial=np.inf) < 0.2:
            continue
        if any(abs(r - s.location) < 0.2 for r in roots for s in spec.singularities):
            continue
        checked += 1
        J = bae.jacobian(spec, roots)
        eps = 1e-6
        for j in range(spec.N):
            dp = roots.copy()
            dm = roots.copy()
            dp[j] += eps
            dm[j] -= eps
            col = (bae.residual(spec, dp) - bae.residual(spec, dm)) / (2 * eps)
            scale = np.maximum(1.0, np.abs(col))
            assert np.max(np.abs(J[:, j] - col) / scale) < 1e-6


def test_jacobian_diagonal_dominance_near_hermite_zeros():
    spec = harmonic(b=1.0, N=3)
    J = bae.jacobian(spec, hermite_zeros(3))
    for k in range(3):
        off = sum(abs(J[k, j]) for j in range(3) if j != k)
        assert abs(J[k, k]) > off


def test_jacobian_offdiagonal_closed_form():
    spec = sextic(N=3)
    roots = np.array([-1.4, 0.3, 2.0])
    J = bae.jacobian(spec, roots)
    for k in range(3):
        for j in range(3):
            if k != j:
                want = -spec.Q(roots[k]) / (roots[k] - roots[j]) ** 2
                assert J[k, j] == pytest.approx(want, rel=1e-14)


def test_solve_harmonic_from_perturbed_hermite():
    spec = harmonic(N=4)
    w = hermite_zeros(4)
    rng = np.random.default_rng(4)
    init = w + rng.uniform(-0.05, 0.05, 4)
    br = bae.solve(spec, init)
    assert br.newton_iters <= 6
    assert np.max(np.abs(np.asarray(br.roots) - w)) < 1e-9


def test_solve_sextic_from_one():
    br = bae.solve(sextic(N=1), [1.0])
    assert br.roots[0] == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_solve_rejects_duplicate_init():
    with pytest.raises(CollisionError):
        bae.solve(harmonic(N=2), [0.3, 0.3])


def test_enumerate_sextic_branches():
    specs = {1: 2, 2: 3, 3: 4}
    for N, want in specs.items():
        branches = bae.enumerate_branches(sextic(N=N))
        assert len(branches) == want
        es = [bae.branch_energy(sextic(N=N), np.asarray(b.roots)) for b in branches]
        assert all(np.isreal(e) for e in es)
        assert es == sorted(es)
    b1 = bae.enumerate_branches(sextic(N=1))
    r = sorted(br.roots[0] for br in b1)
    assert r[0] == pytest.approx(-1 / math.sqrt(2), abs=1e-10)
    assert r[1] == pytest.approx(+1 / math.sqrt(2), abs=1e-10)


def test_enumerate_harmonic_unique_branch():
    branches = bae.enumerate_branches(harmonic(N=3))
    assert len(branches) == 1
    assert np.allclose(branches[0].roots, hermite_zeros(3), atol=1e-10)


def test_enumerate_n0():
    branches = bae.enumerate_branches(harmonic(N=0))
    assert len(branches) == 1
    assert branches[0].roots == ()
    assert branches[0].residual_norm == 0.0


def test_harmonic_rescaling_property():
    b = 2.3
    for n in range(1, 11):
        branches = bae.enumerate_branches(harmonic(b=b, N=n))
        assert len(branches) == 1
        got = np.asarray(branches[0].roots) * math.sqrt(b)
        assert np.max(np.abs(got - hermite_zeros(n))) < 1e-9


def test_morse_p_roots_match_laguerre():
    A, alpha = 5.0, 1.0
    for n in (1, 2, 3, 4):
        spec = catalog.instantiate("morse-p", N=n)
        branches = bae.enumerate_branches(spec)
        assert len(branches) == 1
        want = laguerre_zeros(n, 2 * A / alpha - 2 * n)
        assert np.max(np.abs(np.asarray(branches[0].roots) - want)) < 1e-9


def test_reciprocal_map_equivalence():
    # morse-es roots z_k -> 1/z_k solve the morse-p equations with mu = -N
    for n in (1, 2, 3, 4):
        es = catalog.instantiate("morse-es", N=n)  # default B = alpha/2
        branches = bae.enumerate_branches(es)
        assert len(branches) == 1
        mapped = np.sort(1.0 / np.asarray(branches[0].roots))
        mp = catalog.instantiate("morse-p", N=n)
        assert np.max(np.abs(bae.residual(mp, mapped))) < 1e-9


def test_branch_energy_formula():
    # sextic N=1: E = 4 a sum(z_k) (b = 0)
    e = bae.branch_energy(sextic(N=1), [1 / math.sqrt(2)])
    assert e == pytest.approx(2 * math.sqrt(2), abs=1e-14)
    # morse-es: E = 2 alpha A N - alpha^2 N^2 independent of roots
    spec = catalog.instantiate("morse-es", N=3)
    e = bae.branch_energy(spec, [0.1, 0.2, 0.4])
    assert e == pytest.approx(2 * 5 * 3 - 9, abs=1e-12)


def test_complex_mode_finds_imaginary_pair():
    # type-2 sextic with b = 1: z^3 + z = 0 has z = 0 real and z = +-i
    spec = ModelSpec(Poly([1.0]), Poly([0.0, 1.0, 0.0, 1.0]), (), 1)
    real_only = bae.enumerate_branches(spec)
    assert len(real_only) == 1
    assert abs(real_only[0].roots[0]) < 1e-10
    both = bae.enumerate_branches(spec, complex_mode=True)
    imag = [b for b in both if not b.is_real]
    assert imag, "complex mode should find the imaginary roots"
    assert any(abs(abs(complex(b.roots[0]).imag) - 1.0) < 1e-9 for b in imag)


def test_bae_comparison_tables():
    # no singularities: quoted form and residue form agree
    cmp = bae.bae_comparison(catalog.instantiate("morse-es", N=2))
    assert cmp["diff"] == {}
    # q0 != 0 with singularity at 0: quoted form differs by 2 mu q0 / z
    spec = ModelSpec(Poly([1.0]), Poly([0.5, 1.0]), (Singularity(0.0, 0.3),), 1)
    cmp = bae.bae_comparison(spec)
    assert cmp["diff"] == pytest.approx({"pole@0": 2 * 0.3 * 1.0})
    # trigonometric family: quoted constant omits the -4 p1 piece
    cmp = bae.bae_comparison(catalog.instantiate("trig-interval", N=1))
    assert cmp["diff"] == pytest.approx({"1": 4 * 0.25})


def test_harmonic_residue_terms_match_quoted_form():
    spec = harmonic(b=1.0, N=3)
    terms = bae.residue_bae_terms(spec)
    assert terms == {"z^1": 1.0, "1": 0.0}

import numpy as np
import pytest
from numpy.testing import assert_allclose

from viscmin import morse, surface
from viscmin.errors import GramNotSPD, NonCriticalWarning


def test_equator_spectrum(equator):
    rep = morse.jacobi_spectrum(equator, 0.0, cutoff=4, warn_critical=False)
    assert rep.index == 1
    assert rep.nullity == 3
    assert_allclose(np.min(rep.eigenvalues), -2.0, atol=1e-6)


def test_clifford_spectrum(clifford):
    rep = morse.jacobi_spectrum(clifford, 0.0, cutoff=4, warn_critical=False)
    assert rep.index == 5
    assert rep.nullity == 4
    neg = np.sort(rep.eigenvalues[rep.eigenvalues < -rep.eps_neg])
    assert_allclose(neg, [-4.0, -2.0, -2.0, -2.0, -2.0], atol=1e-6)


def test_index_stabilizes_under_basis_growth(equator):
    a = morse.jacobi_spectrum(equator, 0.0, cutoff=3, warn_critical=False)
    b = morse.jacobi_spectrum(equator, 0.0, cutoff=5, warn_critical=False)
    assert a.index == b.index
    assert a.nullity == b.nullity


def test_sigma_stiffens_spectrum(clifford):
    # the curvature term is positive definite on the clifford modes: at
    # large sigma every direction has positive constrained second variation
    rep = morse.jacobi_spectrum(clifford, 0.5, cutoff=2, warn_critical=False)
    assert rep.index == 0


def test_hessian_diagonal_consistent(clifford):
    basis = morse.normal_variation_basis(clifford, 3)
    H, G, grad_norm = morse.assemble_hessian(clifford, basis, 0.1,
                                             warn_critical=False)
    diag, gram_diag, grad = morse.hessian_diagonal(clifford, basis, 0.1)
    assert_allclose(diag, np.diag(H), rtol=0, atol=0)
    assert_allclose(gram_diag, np.diag(G), rtol=0, atol=0)
    assert len(grad) == len(basis)
    # clifford is A^sigma-critical for every sigma: F is stationary there
    assert np.max(np.abs(grad)) <= 1e-10


def test_gram_positive(clifford):
    basis = morse.normal_variation_basis(clifford, 2)
    G = basis.gram()
    vals = np.linalg.eigvalsh(G)
    assert np.min(vals) > 0


def test_warn_on_noncritical(perturbed_clifford):
    with pytest.warns(NonCriticalWarning):
        morse.jacobi_spectrum(perturbed_clifford, 0.0, cutoff=2,
                              warn_critical=True)


def test_spectrum_report_fields(equator):
    rep = morse.jacobi_spectrum(equator, 0.1, cutoff=3, warn_critical=False)
    d = rep.to_dict()
    for key in ("sigma", "index", "nullity", "eps_neg", "eigenvalues",
                "basis_size", "grad_norm"):
        assert key in d
    assert d["sigma"] == 0.1
    assert d["basis_size"] == len(d["eigenvalues"])


def test_spectrum_index_synthetic():
    # hand-built 3x3 generalized problem: eigenvalues -1, 0, 2
    Q = np.array([[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]])
    mu = np.array([-1.0, 0.0, 2.0])
    H = Q @ np.diag(mu) @ Q.T
    G = Q @ Q.T
    rep = morse.spectrum_index(H, G, eps_neg=1e-8)
    assert rep.index == 1
    assert rep.nullity == 1
    assert_allclose(np.sort(rep.eigenvalues), mu, atol=1e-10)


def test_spectrum_index_rejects_bad_gram():
    H = np.eye(2)
    G = np.array([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(GramNotSPD):
        morse.spectrum_index(H, G)


def test_reparametrization_invariance_of_spectrum(clifford):
    # pull the clifford torus back along a seeded diffeomorphism; the
    # constrained spectrum is a property of the surface, not the chart
    basis = clifford.basis
    rng = np.random.default_rng(11)
    pts = basis.grid_points
    vec = np.zeros_like(pts)
    for (m, n) in [(1, 0), (0, 1), (1, 1), (2, 1)]:
        for trig in (np.sin, np.cos):
            ph = trig(m * pts[:, 0] + n * pts[:, 1])
            vec[:, 0] += rng.normal() * ph
            vec[:, 1] += rng.normal() * ph
    vec *= 0.05 / max(1.0, np.max(np.abs(vec)))
    moved = basis.evaluate_at(clifford.coeffs, pts + vec).real
    im2 = surface.SampledImmersion.from_samples(
        clifford.ambient, clifford.topology, basis, moved)

    ref = morse.jacobi_spectrum(clifford, 0.0, cutoff=3, warn_critical=False)
    rep = morse.jacobi_spectrum(im2, 0.0, cutoff=3, warn_critical=False)
    assert rep.index == ref.index
    assert rep.nullity == ref.nullity
    neg_ref = np.sort(ref.eigenvalues[ref.eigenvalues < -ref.eps_neg])
    neg = np.sort(rep.eigenvalues[rep.eigenvalues < -rep.eps_neg])
    assert np.max(np.abs(neg - neg_ref) / np.abs(neg_ref)) <= 1e-6

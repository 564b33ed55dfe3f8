"""Variation bases, hessian assembly, and Morse index bookkeeping.

The index of a critical point is counted on a finite-dimensional family of
band-limited variations: scalar spectral modes times orthonormal normal
frame fields (plus, optionally, tangential reparametrization fields, which
sit in the radical of the hessian at critical points). The constrained
hessian of the relaxed energy is assembled by exact jet propagation plus
the retraction-curvature first-variation term, and the index/nullity come
from the generalized symmetric eigenproblem against the L2 Gram matrix.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import GramNotSPD, NonCriticalWarning, ShapeMismatch
from .fourier import FourierBasis
from .sphharm import SphHarmBasis
from .surface import Variation, normal_frame, tangential_field
from . import energy

__all__ = [
    "VariationBasis", "SpectrumReport", "scalar_modes",
    "normal_variation_basis", "reparametrization_basis", "assemble_hessian",
    "spectrum_index", "jacobi_spectrum", "CRITICAL_GRAD_TOL",
]

CRITICAL_GRAD_TOL = 1e-6


def scalar_modes(immersion, cutoff):
    """Real scalar mode samples on the immersion grid, with labels.

    Torus: 1, cos/sin(mu + nv) over the canonical half-space with
    |m|, |n| <= cutoff. Sphere: real spherical harmonics with degree
    <= cutoff. Both families are L2-orthogonal on their round reference
    measures, and band-limited by construction.
    """
    basis = immersion.basis
    pts = basis.grid_points
    fields = []
    labels = []
    if isinstance(basis, FourierBasis):
        c = min(cutoff, basis.mmax)
        fields.append(np.ones(len(pts)))
        labels.append("const")
        pairs = [(0, n) for n in range(1, c + 1)]
        for m in range(1, c + 1):
            pairs += [(m, n) for n in range(-c, c + 1)]
        for m, n in pairs:
            phase = m * pts[:, 0] + n * pts[:, 1]
            fields.append(np.cos(phase))
            labels.append(f"cos({m},{n})")
            fields.append(np.sin(phase))
            labels.append(f"sin({m},{n})")
    elif isinstance(basis, SphHarmBasis):
        c = min(cutoff, basis.degree)
        helper = SphHarmBasis(max(2, c))
        for ell in range(c + 1):
            for m in range(-ell, ell + 1):
                coeff = np.zeros(helper.mode_count)
                coeff[ell * ell + ell + m] = 1.0
                fields.append(helper.evaluate_at(coeff[:, None], pts)[:, 0])
                labels.append(f"Y({ell},{m})")
    else:
        raise ShapeMismatch("unsupported basis type")
    return fields, labels


class VariationBasis:
    """A finite family of variations along one immersion."""

    def __init__(self, immersion, fields, labels):
        self.immersion = immersion
        self.fields = list(fields)
        self.labels = list(labels)
        if len(self.fields) != len(self.labels):
            raise ShapeMismatch("fields and labels differ in length")

    def __len__(self):
        return len(self.fields)

    def triples(self):
        """Stacked (W, Wd, Wdd) arrays over the whole family."""
        Ws, Wds, Wdds = [], [], []
        for f in self.fields:
            W, Wd, Wdd = f.derivatives()
            Ws.append(W)
            Wds.append(Wd)
            Wdds.append(Wdd)
        return np.stack(Ws), np.stack(Wds), np.stack(Wdds)

    def gram(self):
        """L2(dvol) Gram matrix of the family."""
        geom = self.immersion.geometry
        vals = np.stack([f.values for f in self.fields])
        return np.einsum("anq,bnq,n->ab", vals, vals, geom.dvol)

    def extend(self, other):
        if other.immersion is not self.immersion:
            raise ShapeMismatch("bases live on different immersions")
        return VariationBasis(self.immersion, self.fields + other.fields,
                              self.labels + other.labels)


def normal_variation_basis(immersion, cutoff):
    """Scalar modes times orthonormal normal frame fields."""
    modes, mode_labels = scalar_modes(immersion, cutoff)
    frames = normal_frame(immersion)
    fields, labels = [], []
    for a, nu in enumerate(frames):
        suffix = f"*nu{a}" if len(frames) > 1 else "*nu"
        for s, lab in zip(modes, mode_labels):
            fields.append(Variation(immersion, samples=s[:, None] * nu))
            labels.append(lab + suffix)
    return VariationBasis(immersion, fields, labels)


def reparametrization_basis(immersion, cutoff):
    """Tangential fields d Phi . X for band-limited chart fields X."""
    modes, mode_labels = scalar_modes(immersion, cutoff)
    fields, labels = [], []
    for s, lab in zip(modes, mode_labels):
        X = np.zeros((len(s), 2))
        X[:, 0] = s
        fields.append(tangential_field(immersion, X))
        labels.append(lab + "*d1")
        X = np.zeros((len(s), 2))
        X[:, 1] = s
        fields.append(tangential_field(immersion, X))
        labels.append(lab + "*d2")
    return VariationBasis(immersion, fields, labels)


def assemble_hessian(immersion, basis, sigma, chunk=64, warn_critical=True):
    """Constrained hessian of A^sigma on a variation basis.

    Returns (H, G, grad_norm): the polarized quadratic form matrix, the L2
    Gram matrix, and the sup of |DA^sigma(w_a)| over Gram-normalized basis
    fields. Warns NonCriticalWarning when the gradient norm is not small.
    """
    W, Wd, Wdd = basis.triples()
    M = len(basis)
    sphere = immersion.ambient.kind == "sphere"

    grad = np.empty(M)
    for lo in range(0, M, chunk):
        hi = min(M, lo + chunk)
        grad[lo:hi] = energy.batched_linear(
            immersion, W[lo:hi], Wd[lo:hi], Wdd[lo:hi], sigma)

    G = basis.gram()
    norms = np.sqrt(np.maximum(np.diag(G), 1e-300))
    grad_norm = float(np.max(np.abs(grad) / norms))
    if warn_critical and grad_norm > CRITICAL_GRAD_TOL:
        warnings.warn(
            f"hessian assembled at a non-critical point "
            f"(gradient norm {grad_norm:.2e})", NonCriticalWarning)

    H = np.zeros((M, M))
    # diagonal entries: single jet pass per field
    diag = np.empty(M)
    for lo in range(0, M, chunk):
        hi = min(M, lo + chunk)
        q, _ = energy.batched_quadratic(
            immersion, W[lo:hi], Wd[lo:hi], Wdd[lo:hi], sigma)
        diag[lo:hi] = q
    # off-diagonal via polarization of sum/difference directions
    pairs = [(a, b) for a in range(M) for b in range(a + 1, M)]
    for lo in range(0, len(pairs), chunk):
        batch = pairs[lo:lo + chunk]
        ia = np.array([p[0] for p in batch])
        ib = np.array([p[1] for p in batch])
        Wp, Wdp, Wddp = W[ia] + W[ib], Wd[ia] + Wd[ib], Wdd[ia] + Wdd[ib]
        Wm, Wdm, Wddm = W[ia] - W[ib], Wd[ia] - Wd[ib], Wdd[ia] - Wdd[ib]
        qp, _ = energy.batched_quadratic(immersion, Wp, Wdp, Wddp, sigma)
        qm, _ = energy.batched_quadratic(immersion, Wm, Wdm, Wddm, sigma)
        vals = 0.25 * (qp - qm)
        H[ia, ib] = vals
        H[ib, ia] = vals
    H[np.diag_indices(M)] = diag

    if sphere:
        # retraction-curvature correction DA^sigma(-(w_a . w_b) Phi)
        P, Pd, Pdd = immersion.derivatives()
        full = [(a, b) for a in range(M) for b in range(a, M)]
        for lo in range(0, len(full), chunk):
            batch = full[lo:lo + chunk]
            ia = np.array([p[0] for p in batch])
            ib = np.array([p[1] for p in batch])
            V, Vd, Vdd = _retraction_triples(
                P, Pd, Pdd, W[ia], Wd[ia], Wdd[ia], W[ib], Wd[ib], Wdd[ib])
            corr = energy.batched_linear(immersion, V, Vd, Vdd, sigma)
            H[ia, ib] += corr
            off = ia != ib
            H[ib[off], ia[off]] += corr[off]

    H = 0.5 * (H + H.T)
    return H, G, grad_norm


def hessian_diagonal(immersion, basis, sigma, chunk=64):
    """Diagonal of the constrained hessian plus gradient, no off-diagonal.

    Returns (diag, gram_diag, grad). One jet pass per chunk, so this scales
    to full-band bases where the dense assembly would not; used by the
    mode-preconditioned critical point solver.
    """
    W, Wd, Wdd = basis.triples()
    M = len(basis)
    sphere = immersion.ambient.kind == "sphere"
    dvol = immersion.geometry.dvol
    gram_diag = np.einsum("anq,anq,n->a", W, W, dvol)
    grad = np.empty(M)
    diag = np.empty(M)
    for lo in range(0, M, chunk):
        hi = min(M, lo + chunk)
        grad[lo:hi] = energy.batched_linear(
            immersion, W[lo:hi], Wd[lo:hi], Wdd[lo:hi], sigma)
        q, _ = energy.batched_quadratic(
            immersion, W[lo:hi], Wd[lo:hi], Wdd[lo:hi], sigma)
        diag[lo:hi] = q
    if sphere:
        P, Pd, Pdd = immersion.derivatives()
        for lo in range(0, M, chunk):
            hi = min(M, lo + chunk)
            V, Vd, Vdd = _retraction_triples(
                P, Pd, Pdd, W[lo:hi], Wd[lo:hi], Wdd[lo:hi],
                W[lo:hi], Wd[lo:hi], Wdd[lo:hi])
            diag[lo:hi] += energy.batched_linear(immersion, V, Vd, Vdd, sigma)
    return diag, gram_diag, grad


def _retraction_triples(P, Pd, Pdd, Wa, Wad, Wadd, Wb, Wbd, Wbdd):
    """Batched product-rule derivatives of -(w_a . w_b) Phi."""
    s = np.einsum("...q,...q->...", Wa, Wb)
    s_i = (np.einsum("...iq,...q->...i", Wad, Wb)
           + np.einsum("...q,...iq->...i", Wa, Wbd))
    s_ij = (np.einsum("...ijq,...q->...ij", Wadd, Wb)
            + np.einsum("...iq,...jq->...ij", Wad, Wbd)
            + np.einsum("...jq,...iq->...ij", Wad, Wbd)
            + np.einsum("...q,...ijq->...ij", Wa, Wbdd))
    V = -s[..., None] * P
    Vd = -(s_i[..., None] * P[..., None, :] + s[..., None, None] * Pd)
    Vdd = -(s_ij[..., None] * P[..., None, None, :]
            + s_i[..., :, None, None] * Pd[..., None, :, :]
            + s_i[..., None, :, None] * Pd[..., :, None, :]
            + s[..., None, None, None] * Pdd)
    return V, Vd, Vdd


class SpectrumReport:
    """Counted spectrum of a constrained hessian on a variation basis."""

    def __init__(self, eigenvalues, eps_neg, sigma, basis_size, grad_norm):
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.eps_neg = float(eps_neg)
        self.sigma = float(sigma)
        self.basis_size = int(basis_size)
        self.grad_norm = float(grad_norm)

    @property
    def index(self):
        return int(np.sum(self.eigenvalues < -self.eps_neg))

    @property
    def nullity(self):
        return int(np.sum(np.abs(self.eigenvalues) <= self.eps_neg))

    def to_dict(self):
        return {
            "sigma": self.sigma,
            "index": self.index,
            "nullity": self.nullity,
            "eps_neg": self.eps_neg,
            "basis_size": self.basis_size,
            "grad_norm": self.grad_norm,
            "eigenvalues": self.eigenvalues.tolist(),
        }

    def __repr__(self):
        return (f"SpectrumReport(sigma={self.sigma:g}, index={self.index}, "
                f"nullity={self.nullity}, basis={self.basis_size})")


def spectrum_index(H, G, sigma=0.0, eps_neg=None, grad_norm=0.0):
    """Generalized eigenvalues of (H, G) with index/nullity counts.

    eps_neg defaults to 1e-6 * max(1, largest |eigenvalue|); eigenvalues in
    [-eps, eps] count as null.
    """
    H = np.asarray(H, dtype=float)
    G = np.asarray(G, dtype=float)
    try:
        scipy.linalg.cholesky(G)
    except scipy.linalg.LinAlgError as exc:
        raise GramNotSPD(f"Gram matrix is not positive definite: {exc}")
    try:
        vals = scipy.linalg.eigh(H, G, eigvals_only=True, driver="gvd")
    except scipy.linalg.LinAlgError:  # pragma: no cover - driver fallback
        vals = scipy.linalg.eigh(H, G, eigvals_only=True)
    if eps_neg is None:
        eps_neg = 1e-6 * max(1.0, float(np.max(np.abs(vals))))
    return SpectrumReport(vals, eps_neg, sigma, H.shape[0], grad_norm)


def jacobi_spectrum(immersion, sigma=0.0, cutoff=4, include_tangential=False,
                    chunk=64, eps_neg=None, warn_critical=True):
    """Spectrum of the constrained A^sigma hessian on the normal-mode basis."""
    basis = normal_variation_basis(immersion, cutoff)
    if include_tangential:
        basis = basis.extend(reparametrization_basis(immersion, cutoff))
    H, G, grad_norm = assemble_hessian(immersion, basis, sigma, chunk=chunk,
                                       warn_critical=warn_critical)
    return spectrum_index(H, G, sigma=sigma, eps_neg=eps_neg,
                          grad_norm=grad_norm)

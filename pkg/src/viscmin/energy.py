"""Relaxed-area energies and their first and second variations.

Three independent evaluation routes coexist on purpose:

* explicit tensor formulas for the first variation (metric sweep of the
  area form, normal-hessian pairing for the curvature energy, plus the
  radial-frame correction in the sphere ambient);
* exact order-2 jet propagation through the pointwise geometry pipeline for
  second variations (no truncation error, uniform over ambients);
* plain path evaluators (energies of the deformed map at finite t, chain
  rule through the radial projection for the constrained path) that feed
  the finite-difference oracles in the tests and the variation-check CLI.

Cross-checking these against each other is what the test suite does.
"""

import numpy as np

from .errors import NotTangent, ShapeMismatch
from .jets import Jet2
from .surface import Variation, pointwise_geometry, vdot

__all__ = [
    "EnergyReport", "evaluate_energies", "first_variation",
    "first_variation_samples", "covariant_hessian",
    "second_variation_ambient", "second_variation_constrained",
    "second_variation_area_terms", "free_path_energies",
    "projected_path_energies", "fd_first", "fd_second",
    "batched_quadratic", "batched_linear", "AmbientField",
    "polynomial_field", "composed_variation_bounds",
]

TANGENT_TOL = 1e-8


class EnergyReport:
    """Area, curvature energy and the relaxed combination at one sigma."""

    def __init__(self, area, f_energy, sigma=0.0):
        self.area = float(area)
        self.f_energy = float(f_energy)
        self.sigma = float(sigma)

    @property
    def a_sigma(self):
        return self.area + self.sigma ** 2 * self.f_energy

    def to_dict(self):
        return {"area": self.area, "f_energy": self.f_energy,
                "sigma": self.sigma, "a_sigma": self.a_sigma}

    def __repr__(self):
        return (f"EnergyReport(area={self.area:.12g}, "
                f"f={self.f_energy:.12g}, sigma={self.sigma:g})")


def evaluate_energies(immersion, sigma=0.0):
    """Area and integral of (1 + |II|^2)^2 over the immersed surface."""
    geom = immersion.geometry
    f = geom.integrate((1.0 + geom.II_norm2) ** 2)
    return EnergyReport(geom.area, f, sigma)


# ---------------------------------------------------------------------------
# first variation, explicit formulas
# ---------------------------------------------------------------------------

def covariant_hessian(immersion, w):
    """Covariant chart hessian of a variation: W_ij - g^{rs}(P_r.P_ij) W_s."""
    geom = immersion.geometry
    if isinstance(w, Variation):
        _, Wd, Wdd = w.derivatives()
    else:
        raise ShapeMismatch("covariant_hessian needs a Variation")
    return _covariant_hessian_samples(geom, Wd, Wdd)


def _covariant_hessian_samples(geom, Wd, Wdd):
    # Christoffel contraction gamma^s_ij = g^{rs} (P_r . P_ij)
    tang = np.einsum("...rq,...ijq->...ijr", geom.Pd, geom.Pdd)
    gamma = np.einsum("...rs,...ijr->...ijs", geom.ginv, tang)
    return Wdd - np.einsum("...ijs,...sq->...ijq", gamma, Wd)


def first_variation(immersion, w):
    """dArea and dF along a variation, by the explicit tensor formulas."""
    if not isinstance(w, Variation):
        w = Variation(immersion, samples=np.asarray(w, dtype=float))
    W, Wd, Wdd = w.derivatives()
    return first_variation_samples(immersion, W, Wd, Wdd)


def first_variation_samples(immersion, W, Wd, Wdd):
    """Same as first_variation but on raw (W, Wd, Wdd) sample triples.

    The triple must be chart-consistent (Wd, Wdd the actual chart
    derivatives of W); no band-limit is assumed, which lets callers push
    product-rule fields (like retraction curvatures) through exactly.
    """
    geom = immersion.geometry
    u = 0.5 * (np.einsum("...iq,...jq->...ij", geom.Pd, Wd)
               + np.einsum("...iq,...jq->...ij", Wd, geom.Pd))
    tr_u = np.einsum("...ij,...ij->...", geom.ginv, u)
    d_area = geom.integrate(tr_u)

    v = _covariant_hessian_samples(geom, Wd, Wdd)
    # <II, D^g dw>_g with both index pairs swept by the inverse metric
    pair = np.einsum("...ik,...jl,...ijq,...klq->...",
                     geom.ginv, geom.ginv, geom.II, v)
    u_up = np.einsum("...ia,...kb,...ab->...ik", geom.ginv, geom.ginv, u)
    t1 = np.einsum("...ik,...jl,...ijq,...klq->...",
                   u_up, geom.ginv, geom.II, geom.II)
    d_ii2 = 2.0 * pair - 4.0 * t1
    if immersion.ambient.kind == "sphere":
        # the radial frame vector moves with the family: projector sweep
        # contributes tr_g(II) . w
        d_ii2 = d_ii2 + 2.0 * np.einsum("...q,...q->...", geom.trace_II, W)
    e = 1.0 + geom.II_norm2
    d_f = geom.integrate(2.0 * e * d_ii2 + e * e * tr_u)
    return {"d_area": float(d_area), "d_f": float(d_f)}


# ---------------------------------------------------------------------------
# second variation via jets
# ---------------------------------------------------------------------------

def _jet_energies(immersion, W, Wd, Wdd):
    """(area, f) as Jet2 scalars along the linear family Phi + t w."""
    P, Pd, Pdd = immersion.derivatives()
    jP = Jet2(np.broadcast_to(P, W.shape).copy(), W)
    jPd = Jet2(np.broadcast_to(Pd, Wd.shape).copy(), Wd)
    jPdd = Jet2(np.broadcast_to(Pdd, Wdd.shape).copy(), Wdd)
    pw = pointwise_geometry(jP, jPd, jPdd, immersion.ambient)
    weights = immersion.basis.chart_weights
    area = (pw["sqrt_det"] * weights).sum(axis=-1)
    e = 1.0 + pw["II2"]
    f = (e * e * pw["sqrt_det"] * weights).sum(axis=-1)
    return area, f


def second_variation_ambient(immersion, w, w_other=None):
    """Exact second derivatives of (Area, F) along the free ambient family.

    For two different directions the polarized value
    (1/4)[q(w + w') - q(w - w')] is returned.
    """
    if not isinstance(w, Variation):
        w = Variation(immersion, samples=np.asarray(w, dtype=float))
    if w_other is None or w_other is w:
        W, Wd, Wdd = w.derivatives()
        area, f = _jet_energies(immersion, W, Wd, Wdd)
        return {"d2_area": float(area.c), "d2_f": float(f.c),
                "d_area": float(area.b), "d_f": float(f.b)}
    plus = second_variation_ambient(immersion, w + w_other)
    minus = second_variation_ambient(immersion, w - w_other)
    return {"d2_area": 0.25 * (plus["d2_area"] - minus["d2_area"]),
            "d2_f": 0.25 * (plus["d2_f"] - minus["d2_f"])}


def second_variation_area_terms(immersion, w):
    """Explicit three-term area hessian (cross-check of the jet route):
    integral of <dw;dw>_g + (tr_g u)^2 - 2 <u,u>_g."""
    if not isinstance(w, Variation):
        w = Variation(immersion, samples=np.asarray(w, dtype=float))
    geom = immersion.geometry
    W, Wd, Wdd = w.derivatives()
    u = 0.5 * (np.einsum("...iq,...jq->...ij", geom.Pd, Wd)
               + np.einsum("...iq,...jq->...ij", Wd, geom.Pd))
    tr_u = np.einsum("...ij,...ij->...", geom.ginv, u)
    dw2 = np.einsum("...ij,...iq,...jq->...", geom.ginv, Wd, Wd)
    uu = np.einsum("...ik,...jl,...ij,...kl->...",
                   geom.ginv, geom.ginv, u, u)
    return geom.integrate(dw2 + tr_u * tr_u - 2.0 * uu)


def _retraction_curvature_triple(immersion, wa, wb):
    """Samples and chart derivatives of the polarized retraction curvature
    field -(w_a . w_b) Phi, by the product rule (exact, no refit)."""
    P, Pd, Pdd = immersion.derivatives()
    Wa, Wad, Wadd = wa.derivatives()
    Wb, Wbd, Wbdd = wb.derivatives()
    s = np.sum(Wa * Wb, axis=-1)
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


def second_variation_constrained(immersion, w, w_other=None, sigma=0.0,
                                 tangent_tol=TANGENT_TOL):
    """Second variation of A^sigma along the constrained (retracted) family.

    Equals the ambient hessian plus the first variation evaluated on the
    retraction curvature -(w . w') Phi. Requires tangent variations in the
    sphere ambient.
    """
    if not isinstance(w, Variation):
        w = Variation(immersion, samples=np.asarray(w, dtype=float))
    wb = w if w_other is None else w_other
    if not isinstance(wb, Variation):
        wb = Variation(immersion, samples=np.asarray(wb, dtype=float))
    if immersion.ambient.kind == "sphere":
        fields = [w] if wb is w else [w, wb]
        for field in fields:
            defect = field.tangency_defect()
            if defect > tangent_tol:
                raise NotTangent(
                    f"variation leaves the tangent bundle by {defect:.2e}")
    amb = second_variation_ambient(immersion, w, None if wb is w else wb)
    d2 = amb["d2_area"] + sigma ** 2 * amb["d2_f"]
    if immersion.ambient.kind == "sphere":
        V, Vd, Vdd = _retraction_curvature_triple(immersion, w, wb)
        fv = first_variation_samples(immersion, V, Vd, Vdd)
        d2 += fv["d_area"] + sigma ** 2 * fv["d_f"]
    return float(d2)


# ---------------------------------------------------------------------------
# batched forms for hessian assembly
# ---------------------------------------------------------------------------

def batched_quadratic(immersion, W, Wd, Wdd, sigma):
    """d2 A^sigma (ambient, diagonal) for a batch of variation triples.

    W : (B, N, Q), Wd : (B, N, 2, Q), Wdd : (B, N, 2, 2, Q)
    Returns (d2_asigma (B,), d_asigma (B,)).
    """
    area, f = _jet_energies(immersion, W, Wd, Wdd)
    return area.c + sigma ** 2 * f.c, area.b + sigma ** 2 * f.b


def batched_linear(immersion, V, Vd, Vdd, sigma):
    """DA^sigma on a batch of raw sample triples (B,) results."""
    geom = immersion.geometry
    u = 0.5 * (np.einsum("...iq,...jq->...ij", geom.Pd, Vd)
               + np.einsum("...iq,...jq->...ij", Vd, geom.Pd))
    tr_u = np.einsum("...ij,...ij->...", geom.ginv, u)
    dvol = geom.dvol
    d_area = np.sum(tr_u * dvol, axis=-1)
    v = _covariant_hessian_samples(geom, Vd, Vdd)
    pair = np.einsum("...ik,...jl,...ijq,...klq->...",
                     geom.ginv, geom.ginv, geom.II, v)
    u_up = np.einsum("...ia,...kb,...ab->...ik", geom.ginv, geom.ginv, u)
    t1 = np.einsum("...ik,...jl,...ijq,...klq->...",
                   u_up, geom.ginv, geom.II, geom.II)
    d_ii2 = 2.0 * pair - 4.0 * t1
    if immersion.ambient.kind == "sphere":
        d_ii2 = d_ii2 + 2.0 * np.einsum("...q,...q->...", geom.trace_II, V)
    e = 1.0 + geom.II_norm2
    d_f = np.sum((2.0 * e * d_ii2 + e * e * tr_u) * dvol, axis=-1)
    return d_area + sigma ** 2 * d_f


# ---------------------------------------------------------------------------
# path evaluators (feed the finite-difference oracles)
# ---------------------------------------------------------------------------

def free_path_energies(immersion, w, t):
    """(area, f) of the map Phi + t w, evaluated pointwise (no refit)."""
    if not isinstance(w, Variation):
        w = Variation(immersion, samples=np.asarray(w, dtype=float))
    P, Pd, Pdd = immersion.derivatives()
    W, Wd, Wdd = w.derivatives()
    pw = pointwise_geometry(P + t * W, Pd + t * Wd, Pdd + t * Wdd,
                            immersion.ambient)
    weights = immersion.basis.chart_weights
    area = float(np.sum(pw["sqrt_det"] * weights))
    e = 1.0 + pw["II2"]
    f = float(np.sum(e * e * pw["sqrt_det"] * weights))
    return area, f


def projected_path_energies(immersion, w, t):
    """(area, f) of the radially retracted map pi(Phi + t w), pointwise.

    Chart derivatives of the retracted map come from the closed-form chain
    rule through z -> z/|z|, so no spectral refit enters: this is the
    independent constrained-path oracle.
    """
    if immersion.ambient.kind != "sphere":
        return free_path_energies(immersion, w, t)
    if not isinstance(w, Variation):
        w = Variation(immersion, samples=np.asarray(w, dtype=float))
    P, Pd, Pdd = immersion.derivatives()
    W, Wd, Wdd = w.derivatives()
    z = P + t * W
    zd = Pd + t * Wd
    zdd = Pdd + t * Wdd
    r2 = np.sum(z * z, axis=-1)
    r = np.sqrt(r2)
    inv_r = 1.0 / r
    y = z * inv_r[..., None]
    zdotzd = np.einsum("...q,...iq->...i", z, zd)
    yd = zd * inv_r[..., None, None] \
        - z[..., None, :] * (zdotzd * inv_r[..., None] ** 3)[..., None]
    zdotzdd = np.einsum("...q,...ijq->...ij", z, zdd)
    zdzd = np.einsum("...iq,...jq->...ij", zd, zd)
    inv_r3 = inv_r ** 3
    inv_r5 = inv_r ** 5
    ydd = (zdd * inv_r[..., None, None, None]
           - zd[..., :, None, :] * (zdotzd * inv_r3[..., None])[..., None, :, None]
           - zd[..., None, :, :] * (zdotzd * inv_r3[..., None])[..., :, None, None]
           - z[..., None, None, :] * ((zdzd + zdotzdd) * inv_r3[..., None, None])[..., None]
           + 3.0 * z[..., None, None, :] * (zdotzd[..., :, None] * zdotzd[..., None, :]
                                            * inv_r5[..., None, None])[..., None])
    pw = pointwise_geometry(y, yd, ydd, immersion.ambient)
    weights = immersion.basis.chart_weights
    area = float(np.sum(pw["sqrt_det"] * weights))
    e = 1.0 + pw["II2"]
    f = float(np.sum(e * e * pw["sqrt_det"] * weights))
    return area, f


def fd_first(path_fn, h=1e-3):
    """Richardson-extrapolated central first difference of a scalar path."""
    def central(step):
        return (path_fn(step) - path_fn(-step)) / (2.0 * step)
    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def fd_second(path_fn, h=1e-3):
    """Richardson-extrapolated central second difference of a scalar path."""
    base = path_fn(0.0)

    def central(step):
        return (path_fn(step) - 2.0 * base + path_fn(-step)) / step ** 2
    return (4.0 * central(h / 2.0) - central(h)) / 3.0


# ---------------------------------------------------------------------------
# ambient fields and composition bounds
# ---------------------------------------------------------------------------

class AmbientField:
    """Vector field on the ambient space with analytic first/second
    derivatives, used for composition estimates v o Phi."""

    def __init__(self, value, jacobian, hessian):
        self.value = value        # (.., Q) -> (.., Q)
        self.jacobian = jacobian  # (.., Q) -> (.., Q, Q)  dv_a/dz_b
        self.hessian = hessian    # (.., Q) -> (.., Q, Q, Q) d2v_a/dz_b dz_c


def polynomial_field(const, lin=None, quad=None):
    """Quadratic ambient polynomial v_a(z) = c_a + L_ab z_b + z^T Q_a z."""
    const = np.asarray(const, dtype=float)
    Q = const.shape[0]
    lin = np.zeros((Q, Q)) if lin is None else np.asarray(lin, dtype=float)
    quad = np.zeros((Q, Q, Q)) if quad is None else np.asarray(quad, dtype=float)
    quad = 0.5 * (quad + np.swapaxes(quad, 1, 2))

    def value(z):
        return (const + np.einsum("ab,...b->...a", lin, z)
                + np.einsum("abc,...b,...c->...a", quad, z, z))

    def jacobian(z):
        return lin + 2.0 * np.einsum("abc,...c->...ab", quad, z)

    def hessian(z):
        return np.broadcast_to(2.0 * quad, z.shape[:-1] + quad.shape).copy()

    return AmbientField(value, jacobian, hessian)


def composed_variation_bounds(immersion, field):
    """Pointwise composition estimates for w = v o Phi.

    Verifies the chain-rule bounds
        |grad w|_g       <= sqrt(2) sup |Dv|
        |covhess w|_g    <= 2 sup |D2v| + sup |Dv| * sup |covhess Phi|_g
    and returns both sides (lhs always <= rhs up to roundoff).
    """
    geom = immersion.geometry
    P, Pd, Pdd = immersion.derivatives()
    J = field.jacobian(P)
    H = field.hessian(P)
    W = field.value(P)
    Wd = np.einsum("...ab,...ib->...ia", J, Pd)
    Wdd = (np.einsum("...abc,...ib,...jc->...ija", H, Pd, Pd)
           + np.einsum("...ab,...ijb->...ija", J, Pdd))
    grad2 = np.einsum("...ij,...ia,...ja->...", geom.ginv, Wd, Wd)
    lhs1 = float(np.sqrt(np.max(grad2)))
    jnorm = np.linalg.norm(J, ord=2, axis=(-2, -1))
    rhs1 = float(np.sqrt(2.0) * np.max(jnorm))

    ch = _covariant_hessian_samples(geom, Wd, Wdd)
    ch2 = np.einsum("...ik,...jl,...ija,...kla->...",
                    geom.ginv, geom.ginv, ch, ch)
    lhs2 = float(np.sqrt(np.max(ch2)))
    # covariant hessian of Phi itself: II plus the radial block on spheres
    cphi = _covariant_hessian_samples(geom, Pd, Pdd)
    cphi2 = np.einsum("...ik,...jl,...ija,...kla->...",
                      geom.ginv, geom.ginv, cphi, cphi)
    hnorm = np.max(np.sqrt(np.sum(H * H, axis=(-3, -2, -1))))
    rhs2 = float(2.0 * hnorm + np.max(jnorm) * np.sqrt(np.max(cphi2)))
    return {"grad_lhs": lhs1, "grad_rhs": rhs1,
            "hess_lhs": lhs2, "hess_rhs": rhs2}

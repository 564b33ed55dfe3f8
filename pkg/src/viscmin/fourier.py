"""Band-limited Fourier fields on the square torus chart [0, 2pi)^2.

The basis owns its collocation grid (n x n, uniform), the band limit
|m|, |n| <= (n-1)//2 (Nyquist bins are dropped so every retained mode has an
exact conjugate partner and real fields stay real bit-for-bit), exact
trapezoidal quadrature, and spectral derivatives of any order. Coefficients
are stored as the full complex FFT array with masked-out bins kept at zero;
a canonical packed real vector is provided for serialization and for
building real variation bases.
"""

import numpy as np

from .errors import ResolutionTooLow, ShapeMismatch

__all__ = ["FourierBasis"]


class FourierBasis:
    """Real trigonometric polynomials of two angles, degree <= (n-1)//2."""

    kind = "fourier"

    def __init__(self, n):
        n = int(n)
        if n < 5:
            raise ResolutionTooLow("torus grid needs n >= 5")
        self.n = n
        self.mmax = (n - 1) // 2
        freqs = np.fft.fftfreq(n, d=1.0 / n).astype(int)
        self.freqs = freqs
        self.mode_mask = (np.abs(freqs)[:, None] <= self.mmax) & \
                         (np.abs(freqs)[None, :] <= self.mmax)
        u = 2.0 * np.pi * np.arange(n) / n
        uu, vv = np.meshgrid(u, u, indexing="ij")
        self.grid_points = np.column_stack([uu.ravel(), vv.ravel()])
        self.num_nodes = n * n
        self.cell_weight = (2.0 * np.pi / n) ** 2
        self.chart_weights = np.full(self.num_nodes, self.cell_weight)
        self._modes = self._canonical_modes()

    def _canonical_modes(self):
        """Deterministic mode order for the packed real vector."""
        M = self.mmax
        modes = [(0, 0)]
        modes += [(0, nn) for nn in range(1, M + 1)]
        for m in range(1, M + 1):
            modes += [(m, nn) for nn in range(-M, M + 1)]
        return modes

    @property
    def mode_count(self):
        """Real degrees of freedom per scalar component."""
        return (2 * self.mmax + 1) ** 2

    # -- transforms ----------------------------------------------------------

    def _as_grid(self, samples):
        samples = np.asarray(samples)
        if samples.shape[0] != self.num_nodes:
            raise ShapeMismatch(
                f"expected {self.num_nodes} samples, got {samples.shape[0]}")
        flat = samples.reshape(self.n, self.n, -1)
        return flat, samples.shape[1:]

    def fit(self, samples):
        """Least-squares (here: exact collocation) fit of grid samples.

        samples : (num_nodes, ...) real or complex
        returns complex coefficients shaped (n, n, ...) with masked bins zero.
        """
        grid, tail = self._as_grid(samples)
        coeffs = np.fft.fft2(grid, axes=(0, 1)) / self.num_nodes
        coeffs[~self.mode_mask] = 0.0
        return coeffs.reshape((self.n, self.n) + tail)

    def evaluate(self, coeffs, deriv=(0, 0)):
        """Evaluate (a derivative of) the field on the collocation grid.

        Always returns complex values; real fields have (numerically) zero
        imaginary part, take .real at the call site.
        """
        coeffs = np.asarray(coeffs)
        tail = coeffs.shape[2:]
        work = coeffs.reshape(self.n, self.n, -1)
        a, b = deriv
        if a or b:
            fm = (1j * self.freqs)[:, None, None]
            fn = (1j * self.freqs)[None, :, None]
            work = work * fm ** a * fn ** b
        vals = np.fft.ifft2(work * self.num_nodes, axes=(0, 1))
        return vals.reshape((self.num_nodes,) + tail)

    def evaluate_at(self, coeffs, points, deriv=(0, 0)):
        """Evaluate at arbitrary chart points by direct trigonometric sums.

        Complex output, same convention as evaluate().
        """
        coeffs = np.asarray(coeffs)
        points = np.asarray(points, dtype=float)
        tail = coeffs.shape[2:]
        kept = self.mode_mask
        mm, nn = np.meshgrid(self.freqs, self.freqs, indexing="ij")
        ms, ns = mm[kept], nn[kept]
        ck = coeffs.reshape(self.n, self.n, -1)[kept]          # (K, comp)
        a, b = deriv
        if a or b:
            ck = ck * ((1j * ms) ** a * (1j * ns) ** b)[:, None]
        phase = np.exp(1j * (points[:, :1] * ms[None, :]
                             + points[:, 1:2] * ns[None, :]))  # (p, K)
        vals = phase @ ck
        return vals.reshape((len(points),) + tail)

    # -- packed real coefficients -------------------------------------------

    def pack_real(self, coeffs):
        """Canonical real coefficient vector(s), shape (mode_count, ...)."""
        coeffs = np.asarray(coeffs)
        tail = coeffs.shape[2:]
        c = coeffs.reshape(self.n, self.n, -1)
        out = np.empty((self.mode_count,) + c.shape[2:])
        out[0] = c[0, 0].real
        k = 1
        for (m, nn) in self._modes[1:]:
            cm = c[m % self.n, nn % self.n]
            out[k] = 2.0 * cm.real
            out[k + 1] = -2.0 * cm.imag
            k += 2
        return out.reshape((self.mode_count,) + tail)

    def unpack_real(self, vec):
        """Inverse of pack_real (exact round trip)."""
        vec = np.asarray(vec, dtype=float)
        tail = vec.shape[1:]
        v = vec.reshape(self.mode_count, -1)
        c = np.zeros((self.n, self.n, v.shape[1]), dtype=complex)
        c[0, 0] = v[0]
        k = 1
        for (m, nn) in self._modes[1:]:
            half = 0.5 * (v[k] - 1j * v[k + 1])
            c[m % self.n, nn % self.n] = half
            c[(-m) % self.n, (-nn) % self.n] = np.conj(half)
            k += 2
        return c.reshape((self.n, self.n) + tail)

    # -- misc ---------------------------------------------------------------

    def resample(self, n2):
        return FourierBasis(n2)

    def transfer(self, coeffs, target):
        """Zero-pad / truncate coefficients onto another Fourier basis."""
        if not isinstance(target, FourierBasis):
            raise ShapeMismatch("can only transfer between torus bases")
        coeffs = np.asarray(coeffs)
        tail = coeffs.shape[2:]
        src = coeffs.reshape(self.n, self.n, -1)
        dst = np.zeros((target.n, target.n, src.shape[2]), dtype=complex)
        M = min(self.mmax, target.mmax)
        cols = np.arange(-M, M + 1)
        for m in range(-M, M + 1):
            dst[m % target.n, cols % target.n] = src[m % self.n, cols % self.n]
        return dst.reshape((target.n, target.n) + tail)

    def to_dict(self):
        return {"type": "fourier", "modes": self.n}

    def __repr__(self):
        return f"FourierBasis(n={self.n}, mmax={self.mmax})"

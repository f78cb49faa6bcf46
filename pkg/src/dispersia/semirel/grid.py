"""
Periodic spectral grids and the semirelativistic kinetic operator T = sqrt(1 - Laplacian) - 1.
"""

import numpy as np


def kinetic_symbol(q):
    """``sqrt(1 + q) - 1`` for ``q = |p|^2 >= 0``, in the cancellation-free form ``q / (sqrt(1 + q) + 1)``."""
    q = np.asarray(q, dtype=float)
    return q / (np.sqrt(1.0 + q) + 1.0)


class SpectralGrid:
    """Uniform periodic grid on ``[-half_width, half_width)^d``.

    Parameters
    ----------
    d : {1, 3}
    n : int
        Points per axis, a power of two.
    half_width : float
    """

    def __init__(self, d, n, half_width):
        if d not in (1, 3):
            raise ValueError("dimension must be 1 or 3")
        n = int(n)
        if n < 2 or n & (n - 1):
            raise ValueError("points per axis must be a power of two")
        if not half_width > 0:
            raise ValueError("half_width must be positive")
        self.d, self.n, self.half_width = d, n, float(half_width)
        self.dx = 2.0 * self.half_width / n
        self.axis = -self.half_width + self.dx * np.arange(n)
        # 2 pi k / (2 half_width) with k in signed FFT order
        self.momenta = 2.0 * np.pi * np.fft.fftfreq(n, d=self.dx)
        if d == 1:
            self.p2 = self.momenta**2
        else:
            px, py, pz = np.meshgrid(self.momenta, self.momenta, self.momenta, indexing="ij")
            self.p2 = px**2 + py**2 + pz**2
        self.symbol = kinetic_symbol(self.p2)
        self.symbol.setflags(write=False)

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def cell_volume(self):
        return self.dx**self.d

    def coordinates(self):
        """Coordinate arrays, one per axis, each of grid shape."""
        if self.d == 1:
            return (self.axis,)
        return np.meshgrid(self.axis, self.axis, self.axis, indexing="ij")

    def radius(self):
        return np.sqrt(sum(c**2 for c in self.coordinates()))

    def fft(self, psi):
        """Unitary discrete transform (so Parseval holds without factors)."""
        return np.fft.fftn(psi, norm="ortho")

    def ifft(self, phi):
        return np.fft.ifftn(phi, norm="ortho")

    def apply_T(self, psi):
        """Fourier multiplier ``sqrt(1 + |p|^2) - 1`` applied to a grid function."""
        psi = np.asarray(psi)
        if psi.shape != self.shape:
            raise ValueError(f"grid function must have shape {self.shape}")
        out = self.ifft(self.symbol * self.fft(psi))
        return out.real if np.isrealobj(psi) else out

    def inner(self, f, g):
        """``<f, g> = sum conj(f) g dV``."""
        return complex(np.vdot(f, g) * self.cell_volume)

    def norm(self, f):
        return float(np.sqrt(np.vdot(f, f).real * self.cell_volume))

    def plane_wave(self, k):
        """``exp(i p . x)`` for the grid momentum with integer index vector ``k``."""
        k = np.broadcast_to(np.asarray(k), (self.d,))
        p = 2.0 * np.pi * np.asarray(k, float) / (2.0 * self.half_width)
        phase = sum(pi * c for pi, c in zip(p, self.coordinates()))
        return np.exp(1j * phase), float(p @ p)


def apply_T(grid, psi):
    return grid.apply_T(psi)

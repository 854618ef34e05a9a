"""Moyal star product on sampled functions.

Samples sit on ``x_k = -L + 2Lk/M`` in every axis.  With the Fourier transform
``f^(eta) = integral f(x) e^{-i x.eta} dx`` the product is the twisted
convolution

    (f * g)^(xi) = (2 pi)^{-d} sum_eta f^(eta) g^(xi - eta) e^{(i/2) eta.theta xi} (d eta)^d

evaluated directly over the discrete frequency lattice.  Frequencies outside
the lattice count as zero, so the convolution is linear rather than circular.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field
from functools import cached_property
import io
import os
from pathlib import Path
import warnings

import numpy as np

from .errors import ValidationError
from .skew import SkewMatrix

__all__ = [
    "GridFunction",
    "star",
    "integral",
    "star_adjoint_check",
    "associativity_residual",
    "read_grid_csv",
    "write_grid_csv",
    "AliasingWarning",
    "PHASE_SIGN",
]

# e^{PHASE_SIGN (i/2) eta.theta xi}: the sign for which plane waves obey
# lambda(xi) lambda(eta) = e^{(i/2) xi.theta eta} lambda(xi + eta)
PHASE_SIGN = +1.0

NYQUIST_TOL = 1e-8
CHUNK = 256


class AliasingWarning(UserWarning):
    """Spectral mass reaches the edge of the frequency lattice."""


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("NCGEO_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on a uniform ``M^d`` grid over ``[-L, L)^d``."""

    d: int
    L: float
    M: int
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError("d must be positive")
        if self.M < 8 or self.M & (self.M - 1):
            raise ValidationError("M must be a power of two and at least 8")
        if not self.L > 0:
            raise ValidationError("L must be positive")
        s = np.array(self.samples, dtype=complex).reshape((self.M,) * self.d)
        if not np.all(np.isfinite(s)):
            raise ValidationError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, func, d: int, L: float = 8.0, M: int = 64) -> "GridFunction":
        """Sample ``func(*coords)`` on the grid (coords broadcast as ``d`` arrays)."""
        axes = np.meshgrid(*([cls.axis(L, M)] * d), indexing="ij")
        return cls(d, L, M, func(*axes))

    @staticmethod
    def axis(L: float, M: int) -> np.ndarray:
        return -L + 2 * L * np.arange(M) / M

    @property
    def h(self) -> float:
        return 2 * self.L / self.M

    @property
    def dfreq(self) -> float:
        return np.pi / self.L

    def freq_axis(self) -> np.ndarray:
        return self.dfreq * (np.arange(self.M) - self.M // 2)

    def same_grid(self, other: "GridFunction") -> bool:
        return (self.d, self.L, self.M) == (other.d, other.L, other.M)

    @cached_property
    def fourier(self) -> np.ndarray:
        """``f^`` on the centred frequency lattice (axis order matches the samples)."""
        raw = np.fft.fftshift(np.fft.fftn(self.samples))
        eta = self.freq_axis()
        phase = np.ones((1,) * 0)
        for ax in range(self.d):
            shape = [1] * self.d
            shape[ax] = self.M
            phase = phase * np.exp(1j * eta * self.L).reshape(shape)
        out = self.h**self.d * raw * phase
        out.setflags(write=False)
        return out

    @classmethod
    def from_fourier(cls, fhat: np.ndarray, d: int, L: float, M: int) -> "GridFunction":
        h = 2 * L / M
        eta = (np.pi / L) * (np.arange(M) - M // 2)
        phase = np.ones((1,) * 0)
        for ax in range(d):
            shape = [1] * d
            shape[ax] = M
            phase = phase * np.exp(-1j * eta * L).reshape(shape)
        samples = np.fft.ifftn(np.fft.ifftshift(fhat * phase)) / h**d
        return cls(d, L, M, samples)

    def nyquist_fraction(self) -> float:
        """Share of ``sum |f^|^2`` on the outermost frequency shell."""
        p = np.abs(self.fourier) ** 2
        total = float(np.sum(p))
        if total == 0.0:
            return 0.0
        idx = np.arange(self.M) - self.M // 2
        edge_1d = np.abs(idx) >= self.M // 2 - 1
        mask = np.zeros(p.shape, dtype=bool)
        for ax in range(self.d):
            shape = [1] * self.d
            shape[ax] = self.M
            mask |= edge_1d.reshape(shape)
        return float(np.sum(p[mask])) / total

    def conj(self) -> "GridFunction":
        return GridFunction(self.d, self.L, self.M, np.conj(self.samples))

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.d, self.L, self.M, self.samples * other.samples)
        return GridFunction(self.d, self.L, self.M, self.samples * other)

    __rmul__ = __mul__

    def __add__(self, other: "GridFunction"):
        self._check(other)
        return GridFunction(self.d, self.L, self.M, self.samples + other.samples)

    def __sub__(self, other: "GridFunction"):
        self._check(other)
        return GridFunction(self.d, self.L, self.M, self.samples - other.samples)

    def _check(self, other):
        if not self.same_grid(other):
            raise ValidationError("grid functions live on different grids")

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))


def _theta_matrix(theta, d: int) -> np.ndarray:
    if isinstance(theta, SkewMatrix):
        m = theta.entries
    else:
        arr = np.asarray(theta, dtype=float)
        m = SkewMatrix.scalar(float(arr)).entries if arr.ndim == 0 else SkewMatrix(arr).entries
    if m.shape != (d, d):
        raise ValidationError(f"theta is {m.shape[0]}x{m.shape[0]} but the grid has d={d}")
    return m


def star(f: GridFunction, g: GridFunction, theta) -> GridFunction:
    """``f *_theta g`` on the common grid.

    Warns with :class:`AliasingWarning` when either factor has more than
    ``1e-8`` of its spectral mass on the outermost frequency shell.
    """
    f._check(g)
    d, M = f.d, f.M
    th = _theta_matrix(theta, d)
    for name, fn in (("f", f), ("g", g)):
        frac = fn.nyquist_fraction()
        if frac > NYQUIST_TOL:
            warnings.warn(
                f"{name} has {frac:.2e} of its spectral mass at the Nyquist shell",
                AliasingWarning,
                stacklevel=2,
            )
    half = M // 2
    idx = np.indices((M,) * d).reshape(d, -1).T - half  # signed lattice indices
    eta = f.dfreq * idx
    fh = f.fourier.reshape(-1)
    # g^ on a zero-padded lattice so that any difference of indices is addressable
    pad = np.zeros((2 * M,) * d, dtype=complex)
    pad[tuple(slice(half, half + M) for _ in range(d))] = g.fourier
    strides = (2 * M) ** np.arange(d - 1, -1, -1)
    eta_theta = eta @ th  # row p: (eta_p theta)_b
    scale = (2 * np.pi) ** (-d) * f.dfreq**d
    npts = idx.shape[0]

    def chunk(lo: int) -> np.ndarray:
        out_idx = idx[lo : lo + CHUNK]
        diff = out_idx[:, None, :] - idx[None, :, :] + half + half  # into padded frame
        flat = np.tensordot(diff, strides, axes=([2], [0]))
        gv = pad.reshape(-1)[flat]
        phase = np.exp(PHASE_SIGN * 0.5j * ((out_idx * f.dfreq) @ eta_theta.T))
        return np.sum(fh[None, :] * gv * phase, axis=1)

    starts = range(0, npts, CHUNK)
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk, starts))
    else:
        parts = [chunk(lo) for lo in starts]
    hhat = scale * np.concatenate(parts).reshape((M,) * d)
    return GridFunction.from_fourier(hhat, d, f.L, M)


def integral(f: GridFunction) -> complex:
    """Trapezoidal (periodic) quadrature of ``f`` over the box."""
    return complex(f.h**f.d * np.sum(f.samples))


def star_adjoint_check(f: GridFunction, g: GridFunction, theta) -> float:
    """``sup | conj(f) * conj(g) - conj(g * f) |``."""
    lhs = star(f.conj(), g.conj(), theta)
    rhs = star(g, f, theta).conj()
    return (lhs - rhs).sup_norm()


def associativity_residual(f: GridFunction, g: GridFunction, h: GridFunction, theta) -> float:
    return (star(star(f, g, theta), h, theta) - star(f, star(g, h, theta), theta)).sup_norm()


def write_grid_csv(f: GridFunction, path=None) -> str:
    """CSV with a ``d,L,M`` header row, then ``re,im`` rows in C order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "L", "M"])
    w.writerow([f.d, format(f.L, ".17g"), f.M])
    w.writerow(["re", "im"])
    for z in f.samples.reshape(-1):
        w.writerow([format(z.real, ".17g"), format(z.imag, ".17g")])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_grid_csv(path) -> GridFunction:
    try:
        rows = list(csv.reader(io.StringIO(Path(path).read_text())))
    except OSError as exc:
        raise ValidationError(f"cannot read grid from {path}: {exc}") from exc
    try:
        if [c.strip() for c in rows[0]] != ["d", "L", "M"] or [c.strip() for c in rows[2]] != ["re", "im"]:
            raise ValueError("bad header")
        d, L, M = int(rows[1][0]), float(rows[1][1]), int(rows[1][2])
        data = np.array([[float(r[0]), float(r[1])] for r in rows[3:] if r], dtype=float)
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed grid CSV ({exc})") from exc
    if data.shape[0] != M**d:
        raise ValidationError(f"{path}: expected {M**d} samples, found {data.shape[0]}")
    return GridFunction(d, L, M, data[:, 0] + 1j * data[:, 1])

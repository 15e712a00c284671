"""FFT-backed structured matrix kernels.

Circulant, square-Toeplitz, rectangular-Toeplitz and Toeplitz-plus-Cross
matrix-vector products, all in O(n log n) via circulant embedding.  The
operator classes here store only generating sequences (O(n) memory) and are
immutable after construction, so they can be shared freely across threads;
transform scratch space is allocated per call.
"""

from __future__ import annotations

import numpy as np
import scipy.fft as _fft

__all__ = [
    "ToeplitzSpec",
    "RectToeplitzSpec",
    "BandedCorrection",
    "BlockVector",
    "TpcOperator",
    "circulant_matvec",
    "toeplitz_matvec",
    "rect_toeplitz_matvec_wide",
    "rect_toeplitz_matvec_tall",
    "tpc_matvec",
]


def circulant_matvec(first_col, x):
    """Multiply the circulant matrix with given first column by ``x``.

    Computed as ifft(fft(c) * fft(x)); real-input transforms are used, so
    the result is real by construction.
    """
    c = np.asarray(first_col, dtype=float)
    x = np.asarray(x, dtype=float)
    if c.ndim != 1 or c.shape != x.shape:
        raise ValueError(f"length mismatch: first_col {c.shape} vs x {x.shape}")
    n = c.size
    if n < 1:
        raise ValueError("empty circulant")
    return _fft.irfft(_fft.rfft(c) * _fft.rfft(x), n)


class ToeplitzSpec:
    """Square Toeplitz matrix described by its generating sequence.

    Entry (i, j) equals ``t[j - i]``; offsets run over [-(m-1), m-1].  Only
    the nonzero window of the sequence is kept (coarse-level operators of
    the banded models have short supports), and the FFT of the embedding
    circulant's first column is cached lazily for matvecs.
    """

    def __init__(self, m, coeffs, symmetric=False):
        coeffs = np.asarray(coeffs, dtype=float)
        if m < 1:
            raise ValueError("m must be positive")
        if coeffs.shape != (2 * m - 1,):
            raise ValueError(f"coeffs must have length 2m-1={2 * m - 1}, got {coeffs.shape}")
        if symmetric and not np.array_equal(coeffs, coeffs[::-1]):
            raise ValueError("symmetric flag set but t_l != t_{-l}")
        self.m = int(m)
        self.symmetric = bool(symmetric)
        nz = np.flatnonzero(coeffs)
        if nz.size == 0:
            self.lo = 0
            self.data = np.zeros(1)
        else:
            self.lo = int(nz[0]) - (m - 1)
            self.data = coeffs[nz[0]:nz[-1] + 1].copy()
        self._symbol = None

    @classmethod
    def from_window(cls, m, lo, data, symmetric=False):
        """Build from a stored window without materializing the full sequence."""
        full = np.zeros(2 * m - 1)
        data = np.asarray(data, dtype=float)
        full[lo + m - 1:lo + m - 1 + data.size] = data
        return cls(m, full, symmetric=symmetric)

    @classmethod
    def identity(cls, m):
        c = np.zeros(2 * m - 1)
        c[m - 1] = 1.0
        return cls(m, c, symmetric=True)

    @classmethod
    def zero(cls, m):
        return cls(m, np.zeros(2 * m - 1), symmetric=True)

    @property
    def coeffs(self):
        """Full generating sequence, length 2m-1, index l + m - 1."""
        full = np.zeros(2 * self.m - 1)
        k = self.lo + self.m - 1
        full[k:k + self.data.size] = self.data
        return full

    @property
    def stored_count(self):
        return self.data.size

    def coeff(self, l):
        """Coefficient t_l; out-of-window offsets read as zero."""
        k = l - self.lo
        if 0 <= k < self.data.size:
            return self.data[k]
        return 0.0

    def transpose(self):
        full = self.coeffs[::-1]
        return ToeplitzSpec(self.m, full, symmetric=self.symmetric)

    def scaled(self, s):
        out = ToeplitzSpec.__new__(ToeplitzSpec)
        out.m = self.m
        out.symmetric = self.symmetric
        out.lo = self.lo
        out.data = self.data * s
        out._symbol = None
        return out

    def _embedded_symbol(self):
        """rfft of the first column of the embedding circulant (cached)."""
        if self._symbol is None:
            m = self.m
            length = _fft.next_fast_len(max(2 * m - 1, 1), real=True)
            col = np.zeros(length)
            full = self.coeffs
            col[:m] = full[m - 1::-1]            # t_0, t_{-1}, ..., t_{-(m-1)}
            if m > 1:
                col[length - (m - 1):] = full[:m - 1:-1]  # t_{m-1}, ..., t_1
            self._symbol = (length, _fft.rfft(col))
        return self._symbol


def toeplitz_matvec(T, x):
    """Dense-equivalent product T @ x through the circulant embedding."""
    x = np.asarray(x, dtype=float)
    if x.shape != (T.m,):
        raise ValueError(f"x must have length {T.m}, got {x.shape}")
    length, symbol = T._embedded_symbol()
    return _fft.irfft(symbol * _fft.rfft(x, length), length)[:T.m]


class RectToeplitzSpec:
    """Rectangular Toeplitz block: entry (i, j) = b[j - i].

    Offsets run over [-(rows-1), cols-1]; the sequence has rows+cols-1
    entries.  Matvecs complete the block to a square Toeplitz matrix with
    zero-filled unspecified coefficients.
    """

    def __init__(self, rows, cols, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if rows < 1 or cols < 1:
            raise ValueError("rows and cols must be positive")
        if coeffs.shape != (rows + cols - 1,):
            raise ValueError(
                f"coeffs must have length rows+cols-1={rows + cols - 1}, got {coeffs.shape}")
        self.rows = int(rows)
        self.cols = int(cols)
        self.coeffs = coeffs.copy()   # index l + rows - 1
        self._square = None

    def coeff(self, l):
        k = l + self.rows - 1
        if 0 <= k < self.coeffs.size:
            return self.coeffs[k]
        return 0.0

    def _completed(self):
        """Square Toeplitz of size max(rows, cols) with zero-filled triangle."""
        if self._square is None:
            n = max(self.rows, self.cols)
            full = np.zeros(2 * n - 1)
            # offsets available: -(rows-1) .. cols-1
            full[(n - 1) - (self.rows - 1):(n - 1) + self.cols] = self.coeffs
            self._square = ToeplitzSpec(n, full)
        return self._square


def rect_toeplitz_matvec_wide(B, w):
    """Product B @ w for a wide block (rows < cols): first rows of B_T w."""
    if B.rows >= B.cols:
        raise ValueError("wide matvec requires rows < cols")
    w = np.asarray(w, dtype=float)
    if w.shape != (B.cols,):
        raise ValueError(f"w must have length {B.cols}, got {w.shape}")
    return toeplitz_matvec(B._completed(), w)[:B.rows]


def rect_toeplitz_matvec_tall(C, v):
    """Product C @ v for a tall block (rows > cols): C_T applied to padded v."""
    if C.rows <= C.cols:
        raise ValueError("tall matvec requires rows > cols")
    v = np.asarray(v, dtype=float)
    if v.shape != (C.cols,):
        raise ValueError(f"v must have length {C.cols}, got {v.shape}")
    padded = np.zeros(C.rows)
    padded[:C.cols] = v
    return toeplitz_matvec(C._completed(), padded)


class BandedCorrection:
    """Position-dependent banded matrix stored by diagonals.

    Band l holds the entries (i, i+l) for l >= 0 and (i-l, i) for l < 0, in
    both cases indexed from the top-left; band l has length n - |l|.  Houses
    the non-Toeplitz diagonal part of the gamma-kernel model and its
    Galerkin descendants (diagonal coarsens to tridiagonal, then stays).
    """

    def __init__(self, n, bands):
        self.n = int(n)
        self.bands = {}
        for l, band in bands.items():
            band = np.asarray(band, dtype=float)
            if band.shape != (n - abs(l),):
                raise ValueError(f"band {l} must have length {n - abs(l)}, got {band.shape}")
            if np.any(band):
                self.bands[int(l)] = band.copy()

    @property
    def bandwidth(self):
        return max((abs(l) for l in self.bands), default=0)

    @property
    def stored_count(self):
        return sum(b.size for b in self.bands.values())

    def band(self, l):
        return self.bands.get(l)

    def main_diagonal(self):
        d = np.zeros(self.n)
        if 0 in self.bands:
            d += self.bands[0]
        return d

    def matvec(self, x):
        y = np.zeros(self.n)
        for l, band in self.bands.items():
            if l >= 0:
                y[:self.n - l] += band * x[l:]
            else:
                y[-l:] += band * x[:self.n + l]
        return y

    def scaled(self, s):
        return BandedCorrection(self.n, {l: b * s for l, b in self.bands.items()})

    def dense(self):
        out = np.zeros((self.n, self.n))
        for l, band in self.bands.items():
            i = np.arange(self.n - abs(l))
            if l >= 0:
                out[i, i + l] = band
            else:
                out[i - l, i] = band
        return out

    def is_symmetric(self):
        return all(
            -l in self.bands and np.array_equal(self.bands[l], self.bands[-l])
            for l in self.bands if l > 0
        ) and all(-l in self.bands for l in self.bands if l < 0)


class BlockVector:
    """Grid function in block ordering: integer-node part v (length m)
    followed by the half-node part w (length m+1)."""

    def __init__(self, v, w):
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        if v.ndim != 1 or w.ndim != 1 or w.size != v.size + 1:
            raise ValueError(f"need len(w) == len(v)+1, got {v.shape}, {w.shape}")
        self.data = np.concatenate([v, w])
        self.m = v.size

    @classmethod
    def from_array(cls, data):
        data = np.asarray(data, dtype=float)
        if data.ndim != 1 or data.size % 2 == 0:
            raise ValueError("block vector length must be odd")
        m = (data.size - 1) // 2
        out = cls.__new__(cls)
        out.data = data.copy()
        out.m = m
        return out

    @property
    def v(self):
        return self.data[:self.m]

    @property
    def w(self):
        return self.data[self.m:]

    @property
    def n(self):
        return self.data.size

    def copy(self):
        return BlockVector.from_array(self.data)


def _as_array(x, n):
    arr = x.data if isinstance(x, BlockVector) else np.asarray(x, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"vector must have length {n}, got {arr.shape}")
    return arr


class TpcOperator:
    """One level's Toeplitz-plus-Cross operator.

    Dense layout for half-size m (total size n = 2m+1):

        [ A      p   Bbar ]
        [ q      o   zeta ]
        [ Cbar   xi  Dbar ]

    with A, Bbar, Cbar, Dbar square Toeplitz blocks of size m, the cross
    row/column through index m+1, plus an optional banded correction.  The
    symmetric flag asserts A, Dbar symmetric, Cbar = Bbar^T, q = p,
    zeta = xi and a symmetric banded part.
    """

    def __init__(self, A, Bbar, Cbar, Dbar, p, q, xi, zeta, o,
                 banded=None, symmetric=False):
        m = A.m
        if not (Bbar.m == Cbar.m == Dbar.m == m):
            raise ValueError("all Toeplitz blocks must share the half-size m")
        self.A, self.Bbar, self.Cbar, self.Dbar = A, Bbar, Cbar, Dbar
        self.p = np.asarray(p, dtype=float)
        self.q = np.asarray(q, dtype=float)
        self.xi = np.asarray(xi, dtype=float)
        self.zeta = np.asarray(zeta, dtype=float)
        for name, vec in (("p", self.p), ("q", self.q), ("xi", self.xi), ("zeta", self.zeta)):
            if vec.shape != (m,):
                raise ValueError(f"cross vector {name} must have length {m}")
        self.o = float(o)
        self.m = m
        self.n = 2 * m + 1
        if banded is not None and banded.n != self.n:
            raise ValueError(f"banded correction size {banded.n} != {self.n}")
        self.banded = banded
        self.symmetric = bool(symmetric)
        if symmetric:
            self._check_symmetric()
        self._diag = None

    def _check_symmetric(self):
        ok = (self.A.symmetric and self.Dbar.symmetric
              and np.array_equal(self.Cbar.coeffs, self.Bbar.coeffs[::-1])
              and np.array_equal(self.q, self.p)
              and np.array_equal(self.zeta, self.xi)
              and (self.banded is None or self.banded.is_symmetric()))
        if not ok:
            raise ValueError("symmetric flag set on a non-symmetric operator")

    @classmethod
    def identity(cls, m):
        return cls(ToeplitzSpec.identity(m), ToeplitzSpec.zero(m),
                   ToeplitzSpec.zero(m), ToeplitzSpec.identity(m),
                   np.zeros(m), np.zeros(m), np.zeros(m), np.zeros(m), 1.0,
                   symmetric=True)

    def matvec(self, x):
        """Product with a length-n array: four Toeplitz matvecs, the O(m)
        cross terms, and the banded correction."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"x must have length {self.n}, got {x.shape}")
        m = self.m
        v, wo, wbar = x[:m], x[m], x[m + 1:]
        yv = toeplitz_matvec(self.A, v) + toeplitz_matvec(self.Bbar, wbar) + self.p * wo
        yo = self.q @ v + self.o * wo + self.zeta @ wbar
        yw = toeplitz_matvec(self.Cbar, v) + toeplitz_matvec(self.Dbar, wbar) + self.xi * wo
        y = np.concatenate([yv, [yo], yw])
        if self.banded is not None:
            y += self.banded.matvec(x)
        return y

    def diagonal(self):
        """Main diagonal: a_0 entries, o, d_0 entries plus the banded diagonal."""
        if self._diag is None:
            d = np.concatenate([
                np.full(self.m, self.A.coeff(0)),
                [self.o],
                np.full(self.m, self.Dbar.coeff(0)),
            ])
            if self.banded is not None:
                d = d + self.banded.main_diagonal()
            self._diag = d
        return self._diag

    def scale_shift(self, scale, shift):
        """Return shift*I + scale*self; the identity goes into a_0, o, d_0."""
        def shifted(spec):
            full = spec.coeffs * scale
            full[spec.m - 1] += shift
            return ToeplitzSpec(spec.m, full, symmetric=spec.symmetric)

        return TpcOperator(
            shifted(self.A), self.Bbar.scaled(scale), self.Cbar.scaled(scale),
            shifted(self.Dbar), self.p * scale, self.q * scale,
            self.xi * scale, self.zeta * scale, scale * self.o + shift,
            banded=None if self.banded is None else self.banded.scaled(scale),
            symmetric=self.symmetric)

    def without_banded(self):
        if self.banded is None:
            return self
        return TpcOperator(self.A, self.Bbar, self.Cbar, self.Dbar, self.p,
                           self.q, self.xi, self.zeta, self.o, banded=None,
                           symmetric=self.symmetric)

    def with_banded(self, banded):
        return TpcOperator(self.A, self.Bbar, self.Cbar, self.Dbar, self.p,
                           self.q, self.xi, self.zeta, self.o, banded=banded,
                           symmetric=self.symmetric)

    @property
    def stored_count(self):
        """Coefficients a minimal representation keeps: for symmetric
        operators the mirrored pieces (Cbar, q, zeta) are derivable."""
        count = self.A.stored_count + self.Bbar.stored_count + self.Dbar.stored_count
        count += self.p.size + self.xi.size + 1
        if not self.symmetric:
            count += self.Cbar.stored_count + self.q.size + self.zeta.size
        if self.banded is not None:
            count += self.banded.stored_count
        return count


def tpc_matvec(op, x):
    """BlockVector product with a TpcOperator (array inputs pass through)."""
    if isinstance(x, BlockVector):
        return BlockVector.from_array(op.matvec(x.data))
    return op.matvec(x)

"""Bessel functions, cross-product kernels and eigenvalue root tables.

Integer-order Bessel functions of order 0 and 1 are taken from
:mod:`scipy.special`.  The oscillatory cross-product
``J_m(ky) Y_n(kz) - Y_m(ky) J_n(kz)`` switches to a Hankel-asymptotic phase
form for large arguments, where the direct product of four O(1/sqrt(x))
factors loses digits to cancellation near its zeros.
"""
from __future__ import annotations

import functools
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .params import BoundaryCase, DomainError

__all__ = [
    "ConvergenceError",
    "RootTable",
    "bessel",
    "bessel_scaled",
    "cross_i",
    "cross_psi",
    "cross_psi_scaled",
    "kernel",
    "find_roots",
    "cached_roots",
    "scan_sign_changes",
]


class ConvergenceError(RuntimeError):
    """Raised when a root cannot be polished inside its bracket."""

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        super().__init__(message if bracket is None else f"{message} (bracket [{bracket[0]!r}, {bracket[1]!r}])")
        self.bracket = bracket


_PLAIN = {
    ("J", 0): special.j0,
    ("J", 1): special.j1,
    ("Y", 0): special.y0,
    ("Y", 1): special.y1,
    ("I", 0): special.i0,
    ("I", 1): special.i1,
    ("K", 0): special.k0,
    ("K", 1): special.k1,
}
_SCALED = {
    ("I", 0): special.i0e,
    ("I", 1): special.i1e,
    ("K", 0): special.k0e,
    ("K", 1): special.k1e,
}


def _check_kind(kind: str, order: int) -> tuple[str, int]:
    kind = kind.upper()
    if (kind, order) not in _PLAIN:
        raise ValueError(f"unsupported Bessel function {kind}{order}; kinds J, Y, I, K with order 0 or 1")
    return kind, order


def bessel(kind: str, order: int, x):
    """Evaluate ``J``, ``Y``, ``I`` or ``K`` of order 0 or 1.

    Parameters
    ----------
    kind : {"J", "Y", "I", "K"}
    order : {0, 1}
    x : float or array_like
        Non-negative argument; strictly positive for ``Y`` and ``K``.

    Raises
    ------
    DomainError
        For negative arguments, or ``x <= 0`` with ``Y``/``K``.
    OverflowError
        When ``I`` exceeds the double-precision range.
    """
    kind, order = _check_kind(kind, order)
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)):
        raise DomainError("Bessel argument must be finite")
    if kind in ("Y", "K"):
        if np.any(xa <= 0.0):
            raise DomainError(f"{kind}{order}(x) requires x > 0")
    elif np.any(xa < 0.0):
        raise DomainError(f"{kind}{order}(x) requires x >= 0")
    out = _PLAIN[(kind, order)](xa)
    if kind == "I" and np.any(~np.isfinite(out)):
        raise OverflowError(f"I{order}(x) overflows for x = {float(np.max(xa))!r}; use bessel_scaled")
    return out if np.ndim(out) else float(out)


def bessel_scaled(kind: str, order: int, x):
    """Exponentially scaled modified Bessel functions.

    Returns ``exp(-x) I_n(x)`` or ``exp(x) K_n(x)``.
    """
    kind, order = _check_kind(kind, order)
    if kind not in ("I", "K"):
        raise ValueError("scaling applies to I and K only")
    xa = np.asarray(x, dtype=float)
    if kind == "K" and np.any(xa <= 0.0):
        raise DomainError(f"K{order}(x) requires x > 0")
    if kind == "I" and np.any(xa < 0.0):
        raise DomainError(f"I{order}(x) requires x >= 0")
    out = _SCALED[(kind, order)](xa)
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# oscillatory cross-product

_ASYMPTOTIC_MIN_ARG = 25.0
_SPLIT = 134217729.0  # 2**27 + 1


def _two_prod(a, b):
    """Error-free product: returns ``(p, e)`` with ``a*b = p + e`` exactly."""
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _hankel_pq(order: int, x: np.ndarray, max_terms: int = 40):
    """Asymptotic amplitude series P, Q of Hankel's expansion for large x."""
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = np.ones_like(x)
    for j in range(1, max_terms):
        a = a * (mu - (2 * j - 1) ** 2) / (j * 8.0 * x)
        if j % 2:
            q = q + (-1) ** ((j - 1) // 2) * a
        else:
            p = p + (-1) ** (j // 2) * a
        if np.all(np.abs(a) < 1e-18):
            break
    return p, q


def _cross_i_asymptotic(m: int, n: int, k, y, z):
    # J_m Y_n - Y_m J_n reduces to products of amplitudes times sin/cos of
    # the phase difference k(z - y) - (n - m) pi/2, which is formed exactly.
    a = k * y
    b = k * z
    pa, qa = _hankel_pq(m, a)
    pb, qb = _hankel_pq(n, b)
    theta, lo = _two_prod(k, z - y)
    s0, c0 = np.sin(theta), np.cos(theta)
    s, c = s0 + lo * c0, c0 - lo * s0
    shift = n - m
    if shift == 1:
        s, c = -c, s
    elif shift == -1:
        s, c = c, -s
    return 2.0 / np.pi / np.sqrt(a * b) * ((pa * pb + qa * qb) * s + (pa * qb - qa * pb) * c)


def _hankel_pq_scalar(order: int, x: float, max_terms: int = 40):
    mu = 4.0 * order * order
    p, q, a = 1.0, 0.0, 1.0
    for j in range(1, max_terms):
        a = a * (mu - (2 * j - 1) ** 2) / (j * 8.0 * x)
        if j % 2:
            q += (-1) ** ((j - 1) // 2) * a
        else:
            p += (-1) ** (j // 2) * a
        if abs(a) < 1e-18:
            break
    return p, q


def _cross_i_scalar(m: int, n: int, k: float, y: float, z: float) -> float:
    # float-only twin of cross_i for the root polisher, where numpy overhead dominates
    a, b = k * y, k * z
    if min(a, b) < _ASYMPTOTIC_MIN_ARG:
        return float(_PLAIN[("J", m)](a) * _PLAIN[("Y", n)](b) - _PLAIN[("Y", m)](a) * _PLAIN[("J", n)](b))
    pa, qa = _hankel_pq_scalar(m, a)
    pb, qb = _hankel_pq_scalar(n, b)
    theta, lo = _two_prod(k, z - y)
    s0, c0 = math.sin(theta), math.cos(theta)
    s, c = s0 + lo * c0, c0 - lo * s0
    shift = n - m
    if shift == 1:
        s, c = -c, s
    elif shift == -1:
        s, c = c, -s
    return 2.0 / math.pi / math.sqrt(a * b) * ((pa * pb + qa * qb) * s + (pa * qb - qa * pb) * c)


def _check_orders(m: int, n: int) -> None:
    if m not in (0, 1) or n not in (0, 1):
        raise ValueError(f"cross-product orders must be 0 or 1, got ({m}, {n})")


def cross_i(m: int, n: int, k, y, z):
    """Oscillatory cross-product ``J_m(ky) Y_n(kz) - Y_m(ky) J_n(kz)``.

    Arguments broadcast against each other.  For ``min(ky, kz) >= 25`` an
    asymptotic phase-difference form is used, which keeps the result accurate
    relative to the amplitude of the individual Bessel factors.
    """
    _check_orders(m, n)
    k, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (k, y, z)))
    if np.any(k <= 0.0) or np.any(y <= 0.0) or np.any(z <= 0.0):
        raise DomainError("cross_i requires k, y, z > 0")
    a = k * y
    b = k * z
    big = np.minimum(a, b) >= _ASYMPTOTIC_MIN_ARG
    out = np.empty(a.shape)
    if np.any(big):
        out[big] = _cross_i_asymptotic(m, n, k[big], y[big], z[big])
    small = ~big
    if np.any(small):
        jm, ym = _PLAIN[("J", m)], _PLAIN[("Y", m)]
        jn, yn = _PLAIN[("J", n)], _PLAIN[("Y", n)]
        aa, bb = a[small], b[small]
        out[small] = jm(aa) * yn(bb) - ym(aa) * jn(bb)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# modified cross-product


def cross_psi_scaled(m: int, n: int, phi, upsilon, x):
    """Scaled modified cross-product.

    Returns ``(mantissa, exponent)`` with
    ``K_m(phi x) I_n(ups x) + (-1)**(m+n+1) I_m(phi x) K_n(ups x)
    = mantissa * exp(exponent)``, where ``exponent = |ups - phi| x``.
    """
    _check_orders(m, n)
    phi, upsilon, x = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (phi, upsilon, x)))
    if np.any(phi <= 0.0) or np.any(upsilon <= 0.0) or np.any(x <= 0.0):
        raise DomainError("cross_psi requires Phi, Upsilon, x > 0")
    a = phi * x
    b = upsilon * x
    sign = -1.0 if (m + n) % 2 == 0 else 1.0
    first = _SCALED[("K", m)](a) * _SCALED[("I", n)](b)   # times exp(b - a)
    second = _SCALED[("I", m)](a) * _SCALED[("K", n)](b)  # times exp(a - b)
    d = b - a
    decay = np.exp(-2.0 * np.abs(d))
    mant = np.where(d >= 0.0, first + sign * second * decay, first * decay + sign * second)
    expo = np.abs(d)
    if mant.ndim == 0:
        return float(mant), float(expo)
    return mant, expo


def cross_psi(m: int, n: int, phi, upsilon, x):
    """Modified cross-product ``K_m(phi x) I_n(ups x) + (-1)**(m+n+1) I_m(phi x) K_n(ups x)``.

    Raises
    ------
    OverflowError
        If the value exceeds double range; ratios of such values should be
        formed from :func:`cross_psi_scaled` instead.
    """
    mant, expo = cross_psi_scaled(m, n, phi, upsilon, x)
    with np.errstate(over="ignore"):
        val = mant * np.exp(expo)
    if np.any(~np.isfinite(val)):
        raise OverflowError("cross_psi overflows double range; use cross_psi_scaled")
    return val


# ---------------------------------------------------------------------------
# root tables

_KERNEL_ARGS = {
    # (m, n, y, z) with z/y expressed through r_ext
    BoundaryCase.DD: (0, 0, False),
    BoundaryCase.DN: (1, 0, True),
    BoundaryCase.ND: (1, 0, False),
    BoundaryCase.NN: (1, 1, False),
}


def kernel(case, k, r_ext: float):
    """Normalized eigenvalue condition of a boundary case.

    The cross-product is multiplied by ``(pi/2) k sqrt(r_ext)`` so that its
    amplitude stays O(1) for all ``k``; zeros are unchanged.
    """
    case = BoundaryCase.parse(case)
    m, n, swapped = _KERNEL_ARGS[case]
    y, z = (r_ext, 1.0) if swapped else (1.0, r_ext)
    k = np.asarray(k, dtype=float)
    return 0.5 * np.pi * k * math.sqrt(r_ext) * cross_i(m, n, k, y, z)


@dataclass(frozen=True)
class RootTable:
    """Ascending positive roots of a case's eigenvalue condition.

    Attributes
    ----------
    case : BoundaryCase
    r_ext : float
    roots : ndarray
        Strictly increasing, read-only.
    kernel_residuals : ndarray
        ``|kernel(k_i)|`` on the normalized kernel.
    """

    case: BoundaryCase
    r_ext: float
    roots: np.ndarray
    kernel_residuals: np.ndarray

    def __post_init__(self) -> None:
        for name in ("roots", "kernel_residuals"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.roots.size

    def head(self, n: int) -> "RootTable":
        """Return a table restricted to the ``n`` smallest roots."""
        if n > len(self):
            raise ValueError(f"table holds {len(self)} roots, {n} requested")
        return RootTable(self.case, self.r_ext, self.roots[:n], self.kernel_residuals[:n])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("index,k,residual\n")
        for i, (k, res) in enumerate(zip(self.roots, self.kernel_residuals), start=1):
            buf.write(f"{i},{float(k)!r},{float(res)!r}\n")
        return buf.getvalue()


def scan_sign_changes(case, r_ext: float, k_max: float, step: float) -> int:
    """Count sign changes of the case kernel on a uniform grid in ``(0, k_max]``.

    An independent brute-force count, used to verify that a root table
    misses no roots below ``k_max``.  The grid starts at ``step``; a
    logarithmic sweep below ``step`` catches a root close to the origin.
    """
    ks = np.arange(1, int(math.floor(k_max / step)) + 1) * step
    low = np.geomspace(1e-10 * step, step, 200, endpoint=False)
    f = np.sign(kernel(case, np.concatenate([low, ks]), r_ext))
    return int(np.count_nonzero(f[:-1] * f[1:] < 0))


def _polish(case, r_ext: float, lo: float, hi: float, max_iter: int) -> float:
    m, n, swapped = _KERNEL_ARGS[case]
    y, z = (r_ext, 1.0) if swapped else (1.0, r_ext)
    scale = 0.5 * math.pi * math.sqrt(r_ext)

    def f(k):
        return scale * k * _cross_i_scalar(m, n, k, y, z)

    try:
        root, info = brentq(f, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=max_iter, full_output=True)
    except (RuntimeError, ValueError) as exc:
        raise ConvergenceError(f"root polishing failed: {exc}", (lo, hi)) from exc
    if not info.converged:
        raise ConvergenceError("root polishing did not converge", (lo, hi))
    # brentq stops within a few ulps; keep the neighbour with smallest residual
    cands = [root]
    up = down = root
    for _ in range(3):
        up = math.nextafter(up, math.inf)
        down = math.nextafter(down, 0.0)
        cands += [up, down]
    vals = np.abs(kernel(case, np.array(cands), r_ext))
    return float(cands[int(np.argmin(vals))])


def find_roots(case, r_ext: float, n: int, max_iter: int = 200) -> RootTable:
    """Find the ``n`` smallest positive roots of the case kernel.

    The root axis is scanned with step ``pi / (4 (r_ext - 1))``, a quarter of
    the asymptotic root spacing, preceded by a logarithmic sweep below the
    first step which catches a root close to the origin.  Each sign change is
    polished with Brent's method.

    Raises
    ------
    DomainError
        If ``r_ext <= 1`` or ``n < 1``.
    ConvergenceError
        If polishing fails for a bracket.
    """
    case = BoundaryCase.parse(case)
    if not r_ext > 1.0:
        raise DomainError(f"r_ext must exceed 1, got {r_ext!r}")
    if n < 1:
        raise DomainError(f"need at least one root, got n={n}")
    step = math.pi / (4.0 * (r_ext - 1.0))
    found: list[float] = []

    low = np.geomspace(1e-10 * step, step, 400)
    f = kernel(case, low, r_ext)
    for i in np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]:
        found.append(_polish(case, r_ext, low[i], low[i + 1], max_iter))
        if len(found) >= n:
            break

    k0 = step
    while len(found) < n:
        ks = k0 + step * np.arange(4 * (n - len(found)) + 8)
        f = kernel(case, ks, r_ext)
        for i in np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]:
            found.append(_polish(case, r_ext, ks[i], ks[i + 1], max_iter))
            if len(found) >= n:
                break
        k0 = ks[-1]

    roots = np.array(found[:n])
    if roots.size > 1 and np.any(np.diff(roots) <= 0.0):
        raise ConvergenceError("root table is not strictly increasing")
    residuals = np.abs(kernel(case, roots, r_ext))
    return RootTable(case, float(r_ext), roots, residuals)


@functools.lru_cache(maxsize=64)
def _cached(case: BoundaryCase, r_ext: float, n: int) -> RootTable:
    return find_roots(case, r_ext, n)


def cached_roots(case, r_ext: float, n: int) -> RootTable:
    """Memoized :func:`find_roots`; tables are immutable and safe to share."""
    return _cached(BoundaryCase.parse(case), float(r_ext), int(n))

"""Uniform polynomial approximation on an interval.

Polynomials are held in the Chebyshev basis of the interval; the monomial
form is only produced on request. :func:`remez_best_approx` is a multi-point
exchange algorithm driven by a dense Chebyshev-clustered grid, which also
copes with kinks (``|x - t|``) when the kink is passed as a breakpoint.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import Polynomial
from scipy.optimize import minimize_scalar

MAX_DEGREE = 64
CHECK_GRID = 10_000


class RemezConvergenceError(RuntimeError):
    """Exchange did not reach the requested tolerance; ``best`` holds the best iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class OutOfIntervalWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class PolyApprox:
    coeffs: np.ndarray
    interval: tuple[float, float]
    degree: int
    sup_error: float
    basis: str = "chebyshev"
    levelled_error: float = field(default=float("nan"))

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.size != self.degree + 1:
            raise ValueError("degree + 1 must equal the number of coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x):
        return eval_poly(self, x)

    def to_monomial(self, center: float = 0.0, scale: float = 1.0) -> np.ndarray:
        """Coefficients ``a_k`` with ``p(x) = sum_k a_k ((x - center) / scale)**k``."""
        a, b = self.interval
        cheb = C.Chebyshev(self.coeffs, domain=[a, b])
        poly = cheb.convert(kind=Polynomial, domain=[center - scale, center + scale], window=[-1, 1])
        out = np.zeros(self.degree + 1)
        out[: poly.coef.size] = poly.coef
        return out


def _to_unit(x, a, b):
    return (2 * np.asarray(x, dtype=float) - (a + b)) / (b - a)


def _from_unit(s, a, b):
    return 0.5 * (a + b) + 0.5 * (b - a) * np.asarray(s, dtype=float)


def _vectorize(f):
    def g(x):
        x = np.asarray(x, dtype=float)
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([float(f(t)) for t in x.ravel()]).reshape(x.shape)
    return g


def _dense_grid(a, b, degree, breakpoints=()):
    m = max(4001, 200 * (degree + 2))
    s = np.sort(np.cos(np.linspace(np.pi, 0, m)))
    u = np.linspace(-1, 1, CHECK_GRID)
    extra = [_to_unit(t, a, b) for t in breakpoints if a < t < b]
    s = np.unique(np.concatenate([s, u, np.asarray(extra, dtype=float)]))
    s[0], s[-1] = -1.0, 1.0
    return s


def _sup_error(err_fn, s_grid, refine=True):
    e = err_fn(s_grid)
    if not np.all(np.isfinite(e)):
        raise ValueError("function is not finite on the interval")
    k = int(np.argmax(np.abs(e)))
    best = float(abs(e[k]))
    if refine and 0 < k < s_grid.size - 1:
        lo, hi = s_grid[k - 1], s_grid[k + 1]
        res = minimize_scalar(lambda t: -abs(float(err_fn(np.array([t]))[0])),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
        best = max(best, float(-res.fun))
    return best


def eval_poly(p: PolyApprox, x):
    """Evaluate ``p`` at ``x`` (Clenshaw recurrence in the Chebyshev basis)."""
    a, b = p.interval
    xs = np.asarray(x, dtype=float)
    span = b - a
    if np.any(xs < a - 1e-12 * span) or np.any(xs > b + 1e-12 * span):
        warnings.warn("evaluating a polynomial approximation outside its interval",
                      OutOfIntervalWarning, stacklevel=2)
    if p.basis == "monomial":
        y = np.polynomial.polynomial.polyval(xs, p.coeffs)
    else:
        y = C.chebval(_to_unit(xs, a, b), p.coeffs)
    return float(y) if np.ndim(y) == 0 else y


def _check_args(interval, degree):
    a, b = map(float, interval)
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if degree > MAX_DEGREE:
        raise ValueError(f"degree is capped at {MAX_DEGREE}")
    return a, b


def chebyshev_interpolant(f, interval, degree: int, breakpoints=()) -> PolyApprox:
    """Interpolate ``f`` at the Chebyshev points of the first kind mapped to the interval."""
    a, b = _check_args(interval, degree)
    fv = _vectorize(f)
    coeffs = C.chebinterpolate(lambda s: fv(_from_unit(s, a, b)), degree)
    s_grid = _dense_grid(a, b, degree, breakpoints)

    def err(s):
        return fv(_from_unit(s, a, b)) - C.chebval(s, coeffs)

    sup = _sup_error(err, s_grid, refine=False)
    return PolyApprox(coeffs, (a, b), degree, sup)


def _alternating_extrema(e):
    """Indices of local extrema of ``e`` reduced to a sign-alternating sequence."""
    n = e.size
    d = np.diff(e)
    idx = [0]
    interior = np.nonzero(d[:-1] * d[1:] <= 0)[0] + 1
    idx.extend(interior.tolist())
    idx.append(n - 1)
    idx = np.unique(np.asarray(idx))
    idx = idx[np.abs(e[idx]) > 0]
    out = []
    for i in idx:
        if out and np.sign(e[i]) == np.sign(e[out[-1]]):
            if abs(e[i]) > abs(e[out[-1]]):
                out[-1] = i
        else:
            out.append(i)
    return np.asarray(out, dtype=int)


def remez_best_approx(f, interval, degree: int, tol: float = 1e-3, max_iter: int = 60,
                      breakpoints=()) -> PolyApprox:
    """Best uniform polynomial approximation by the Remez exchange algorithm.

    Stops once the observed maximum error is within ``(1 + tol)`` of the
    levelled reference error, which brackets the minimax error from below
    (de la Vallée Poussin); the returned ``sup_error`` is therefore at most
    ``(1 + tol)`` times the true best error. Pass the locations of kinks in
    ``breakpoints`` so the grid resolves them.
    """
    a, b = _check_args(interval, degree)
    fv = _vectorize(f)
    s_grid = _dense_grid(a, b, degree, breakpoints)
    f_grid = fv(_from_unit(s_grid, a, b))
    if not np.all(np.isfinite(f_grid)):
        raise ValueError("function is not finite on the interval")
    scale = max(float(np.max(np.abs(f_grid))), np.finfo(float).tiny)
    npts = degree + 2

    target = -np.cos(np.pi * np.arange(npts) / (npts - 1))
    # an asymmetric start avoids the degenerate levelled error 0 for even/odd f
    target = target + 0.05 * (1 - target**2) / (npts - 1)
    ref = np.unique(np.searchsorted(s_grid, target).clip(0, s_grid.size - 1))
    if ref.size < npts:
        ref = np.linspace(0, s_grid.size - 1, npts).astype(int)

    def err_at(coeffs):
        return lambda s: fv(_from_unit(s, a, b)) - C.chebval(s, coeffs)

    best = None
    for _ in range(max_iter):
        s_ref = s_grid[ref]
        A = np.empty((npts, npts))
        A[:, :-1] = C.chebvander(s_ref, degree)
        A[:, -1] = (-1.0) ** np.arange(npts)
        sol = np.linalg.solve(A, f_grid[ref])
        coeffs, level = sol[:-1], abs(sol[-1])
        e = f_grid - C.chebval(s_grid, coeffs)
        emax = float(np.max(np.abs(e)))
        if best is None or emax < best.sup_error:
            best = PolyApprox(coeffs, (a, b), degree, emax, levelled_error=level)
        if emax <= 64 * np.finfo(float).eps * scale or emax <= (1 + tol) * level:
            sup = max(emax, _sup_error(err_at(coeffs), s_grid))
            if sup <= (1 + tol) * level or emax <= 64 * np.finfo(float).eps * scale:
                return PolyApprox(coeffs, (a, b), degree, sup, levelled_error=level)
        ext = _alternating_extrema(e)
        if ext.size < npts:
            # single-point exchange: swap the global maximiser into the reference
            k = int(np.argmax(np.abs(e)))
            merged = np.union1d(np.union1d(ref, ext), [k])
            ext = _alternating_extrema_subset(e, merged)
            if ext.size < npts:
                break
        # trim from the ends, smaller end first: keeps alternation and the global maximum
        lo, hi = 0, ext.size
        while hi - lo > npts:
            if abs(e[ext[lo]]) <= abs(e[ext[hi - 1]]):
                lo += 1
            else:
                hi -= 1
        ref = ext[lo:hi]
    raise RemezConvergenceError(
        f"Remez exchange did not converge to tol={tol} at degree {degree}", best=best)


def _alternating_extrema_subset(e, idx):
    out = []
    for i in np.sort(idx):
        if e[i] == 0:
            continue
        if out and np.sign(e[i]) == np.sign(e[out[-1]]):
            if abs(e[i]) > abs(e[out[-1]]):
                out[-1] = i
        else:
            out.append(i)
    return np.asarray(out, dtype=int)

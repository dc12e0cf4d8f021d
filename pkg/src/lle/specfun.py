"""Orthogonal polynomials, quadrature and one-dimensional overlap integrals.

Everything here is pure and reentrant: fixed inputs give bitwise-identical
outputs regardless of evaluation order, so callers may fan grids out across
threads freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, DomainError, NumericError

# Hermite evaluation is supported up to this degree; beyond it the
# asymptotic (Plancherel-Rotach) regime would need dedicated code.
LEVEL_CAP = 60

_SQRT_PI = math.sqrt(math.pi)


def _check_level(ell: int) -> int:
    ell = int(ell)
    if ell < 0:
        raise DomainError(f"level index must be >= 0, got {ell}")
    if ell > LEVEL_CAP:
        raise CapabilityError(f"level index {ell} above supported cap {LEVEL_CAP}")
    return ell


# ---------------------------------------------------------------------------
# Hermite polynomials and functions
# ---------------------------------------------------------------------------

def hermite_poly(ell: int, t):
    """Physicists' Hermite polynomial H_ell(t) by the three-term recurrence.

    Overflow-safe for ell <= 60 and |t| <= 12 (values stay far below the
    double-precision ceiling there).
    """
    ell = _check_level(ell)
    t = np.asarray(t, dtype=float)
    h_prev = np.ones_like(t)
    if ell == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * t
    for k in range(1, ell):
        h, h_prev = 2.0 * t * h - 2.0 * k * h_prev, h
    return h if h.ndim else float(h)


def hermite_poly_normalized(ell: int, t):
    """H_ell(t) / sqrt(2^ell ell!), via the normalized recurrence.

    Stays O(e^{t^2/2}) for all degrees, which keeps Christoffel-Darboux
    quotients and Mehler partial sums inside double range where the raw
    polynomials would overflow.
    """
    ell = int(ell)
    if ell < 0:
        raise DomainError(f"level index must be >= 0, got {ell}")
    t = np.asarray(t, dtype=float)
    h_prev = np.ones_like(t)
    if ell == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = math.sqrt(2.0) * t
    for k in range(1, ell):
        h, h_prev = (math.sqrt(2.0 / (k + 1)) * t * h
                     - math.sqrt(k / (k + 1)) * h_prev), h
    return h if h.ndim else float(h)


def hermite_fn(ell: int, t):
    """Orthonormal oscillator eigenfunction psi_ell(t).

    The normalization (sqrt(pi) 2^ell ell!)^{-1/2} is folded into the
    recurrence (log-free but equivalent to lgamma accumulation), so degrees
    up to the cap never touch an explicit factorial.
    """
    ell = _check_level(ell)
    t = np.asarray(t, dtype=float)
    val = hermite_poly_normalized(ell, t) * np.exp(-0.5 * t * t) * math.pi ** -0.25
    return val if np.ndim(val) else float(val)


def hermite_fn_table(nmax: int, t: np.ndarray) -> np.ndarray:
    """psi_0..psi_nmax evaluated on an array, shape (nmax+1, len(t))."""
    nmax = _check_level(nmax)
    t = np.asarray(t, dtype=float)
    out = np.empty((nmax + 1, t.size))
    gauss = np.exp(-0.5 * t * t) * math.pi ** -0.25
    out[0] = gauss
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * t * gauss
    for k in range(1, nmax):
        out[k + 1] = (math.sqrt(2.0 / (k + 1)) * t * out[k]
                      - math.sqrt(k / (k + 1)) * out[k - 1])
    return out


# ---------------------------------------------------------------------------
# Generalized Laguerre polynomials (complex argument)
# ---------------------------------------------------------------------------

def laguerre(ell: int, k: int, z):
    """Generalized Laguerre polynomial L_ell^{(k)}(z) for complex z.

    Horner evaluation of the explicit binomial sum; the recurrence is avoided
    because its stability for complex arguments is unverified and the sum is
    short at the degrees used here.
    """
    ell = int(ell)
    k = int(k)
    if ell < 0:
        raise DomainError(f"degree must be >= 0, got {ell}")
    if k < -ell:
        raise DomainError(f"superscript {k} below -degree {-ell}")
    coeffs = [(-1.0) ** j / math.factorial(j) * math.comb(ell + k, ell - j)
              for j in range(ell + 1)]
    z = np.asarray(z)
    out = np.zeros_like(z, dtype=complex) + coeffs[ell]
    for j in range(ell - 1, -1, -1):
        out = out * z + coeffs[j]
    if np.ndim(out) == 0:
        out = complex(out)
    return out


# ---------------------------------------------------------------------------
# Gauss-Legendre rules and adaptive quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights on [a, b] with a certified polynomial exactness degree."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float]
    exactness_degree: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def _legendre_and_derivative(n: int, x: np.ndarray):
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p, p_prev = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k, p
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [a, b], nodes by Newton iteration.

    Newton runs on the Legendre recurrence from the Chebyshev-like initial
    guess; each node must converge to 1e-15 or a NumericError naming the node
    is raised.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"node count must be >= 1, got {n}")
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    if n == 1:
        return QuadratureRule(np.array([0.5 * (a + b)]), np.array([float(b - a)]),
                              (float(a), float(b)), 1)
    i = np.arange(1, n + 1)
    x = np.cos(math.pi * (i - 0.25) / (n + 0.5))
    converged = np.zeros(n, dtype=bool)
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x -= dx
        converged = np.abs(dx) < 1e-15
        if converged.all():
            break
    else:
        bad = int(np.argmax(~converged))
        raise NumericError(f"Legendre Newton iteration stalled at node {bad}")
    p, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # flip to increasing order and map onto [a, b]
    x = x[::-1].copy()
    w = w[::-1].copy()
    half = 0.5 * (b - a)
    return QuadratureRule(half * x + 0.5 * (a + b), half * w,
                          (float(a), float(b)), 2 * n - 1)


_GL15 = gauss_legendre(15, -1.0, 1.0)
_GL7 = gauss_legendre(7, -1.0, 1.0)


def adaptive_quad(f, a: float, b: float, tol: float = 1e-12,
                  max_depth: int = 40, noise: float = 0.0) -> float:
    """Recursive bisection with an embedded GL15/GL7 error estimate.

    `f` must accept numpy arrays. Error budget is split proportionally to
    interval length; intervals that disagree beyond their budget are bisected
    up to `max_depth` levels, after which a NumericError is raised. Complex
    integrands are supported. `noise` is the caller's bound on the absolute
    evaluation noise of f per unit length (e.g. cancellation inside the
    integrand); panels are never refined below it.
    """
    a = float(a)
    b = float(b)
    total_len = b - a
    if total_len <= 0:
        raise DomainError(f"need a < b, got [{a}, {b}]")

    def panel(lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        fx = f(half * _GL15.nodes + mid)
        coarse = f(half * _GL7.nodes + mid)
        fine_val = half * np.dot(_GL15.weights, fx)
        coarse_val = half * np.dot(_GL7.weights, coarse)
        # roundoff floor: a panel cannot beat machine precision relative to
        # the magnitude of its own samples
        mag = half * float(np.max(np.abs(fx))) if fx.size else 0.0
        return fine_val, abs(fine_val - coarse_val), mag

    total = 0.0 + 0.0j
    global_mag = 0.0
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        val, err, mag = panel(lo, hi)
        global_mag = max(global_mag, mag)
        # anything below the roundoff of the whole integral is noise
        if err <= (tol * (hi - lo) / total_len + noise * (hi - lo)
                   + 4e-16 * mag + 2.3e-16 * global_mag):
            total += val
        elif depth >= max_depth:
            raise NumericError(
                f"adaptive quadrature hit depth {max_depth} on [{lo}, {hi}] "
                f"(panel error {err:.2e})")
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    if abs(total.imag) == 0.0:
        return total.real
    return total if abs(total.imag) > 1e-300 else total.real


# ---------------------------------------------------------------------------
# erfc and the regularized lower incomplete gamma (series / continued fraction)
# ---------------------------------------------------------------------------

def erfc_cf(x: float) -> float:
    """Complementary error function via power series / Lentz continued fraction.

    Independent of scipy; used as the oracle behind lambda_ell(0, .).
    """
    x = float(x)
    if x < 0.0:
        return 2.0 - erfc_cf(-x)
    if x < 1.5:
        # alternating erf series; cancellation stays below ~e^{x^2} eps here
        # erf series: 2/sqrt(pi) * sum (-1)^k x^{2k+1}/(k!(2k+1))
        term = x
        total = x
        k = 0
        while abs(term) > 1e-18 * abs(total) + 1e-300:
            k += 1
            term *= -x * x / k
            total += term / (2 * k + 1)
        return 1.0 - 2.0 / _SQRT_PI * total
    # continued fraction erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(...))))
    # evaluated by modified Lentz with a_m = m/2 and all partial denominators x
    tiny = 1e-300
    f = x
    c = f
    d = 0.0
    for m in range(1, 400):
        am = 0.5 * m
        d = x + am * d
        if d == 0.0:
            d = tiny
        c = x + am / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-17:
            return math.exp(-x * x) / _SQRT_PI / f
    raise NumericError(f"erfc continued fraction did not converge at x={x}")


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by series or continued fraction.

    Series for x < a + 1, Lentz continued fraction for the complement
    otherwise; prefactor x^a e^{-x}/Gamma(a) is assembled in log space.
    """
    a = float(a)
    x = float(x)
    if a <= 0.0:
        raise DomainError(f"shape must be > 0, got {a}")
    if x < 0.0:
        raise DomainError(f"argument must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    log_pref = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1.0:
        # P series: x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
        term = 1.0
        total = 1.0
        ap = a
        for _ in range(10_000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < 1e-17 * abs(total):
                return min(1.0, math.exp(log_pref) * total / a)
        raise NumericError(f"P(a,x) series stalled at a={a}, x={x}")
    # Q continued fraction (Numerical-Recipes style Lentz)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            q = math.exp(log_pref) * h
            return max(0.0, 1.0 - q)
    raise NumericError(f"Q(a,x) continued fraction stalled at a={a}, x={x}")


# ---------------------------------------------------------------------------
# Truncated-Hermite overlap integrals
# ---------------------------------------------------------------------------

def _upper_cutoff(xi: float) -> float:
    # psi_ell(t)^2 <= C (1+|t|)^{2 ell} e^{-t^2}: remainder beyond
    # max(|xi|, 0) + 10 is below 1e-14 for all supported levels.
    return max(abs(xi), 0.0) + 10.0


def lambda_ell(ell: int, xi: float, tol: float = 1e-12) -> float:
    """Occupation lambda_ell(xi) = integral of psi_ell(t)^2 over [xi, inf)."""
    ell = _check_level(ell)
    xi = float(xi)
    hi = _upper_cutoff(xi)
    if xi >= hi:
        return 0.0
    val = adaptive_quad(lambda t: hermite_fn(ell, t) ** 2, xi, hi, tol=tol)
    return min(1.0, max(0.0, val))


def overlap_lambda(ell1: int, ell2: int, xi: float, tol: float = 1e-12) -> float:
    """Cross overlap of truncated Hermite functions over [xi, inf)."""
    ell1 = _check_level(ell1)
    ell2 = _check_level(ell2)
    xi = float(xi)
    hi = _upper_cutoff(xi)
    if xi >= hi:
        return 0.0
    val = adaptive_quad(lambda t: hermite_fn(ell1, t) * hermite_fn(ell2, t),
                        xi, hi, tol=tol)
    return float(val)


@dataclass
class OverlapTable:
    """Dense table of overlap integrals on a xi grid.

    values[l1, l2, i] = overlap_lambda(l1, l2, xi_grid[i]); built by one
    cumulative sweep from the far tail so a whole coefficient-integration grid
    costs a single pass of panelized quadrature per level pair.
    """

    xi_grid: np.ndarray
    max_level: int
    values: np.ndarray = field(repr=False)

    def value(self, l1: int, l2: int, i: int) -> float:
        return float(self.values[l1, l2, i])


def build_overlap_table(max_level: int, xi_grid: np.ndarray,
                        panel_nodes: int = 12) -> OverlapTable:
    max_level = _check_level(max_level)
    xi = np.asarray(xi_grid, dtype=float)
    if xi.ndim != 1 or xi.size < 1:
        raise DomainError("xi grid must be a nonempty 1-D array")
    if np.any(np.diff(xi) <= 0):
        raise DomainError("xi grid must be strictly increasing")
    ref = gauss_legendre(panel_nodes, 0.0, 1.0)
    hi = _upper_cutoff(float(xi[-1]))
    edges = np.concatenate([xi, np.linspace(float(xi[-1]), hi, 64)[1:]])
    n = max_level + 1
    segs = np.zeros((n, n, edges.size - 1))
    for i in range(edges.size - 1):
        lo, up = edges[i], edges[i + 1]
        if up <= lo:
            continue
        t = lo + (up - lo) * ref.nodes
        w = (up - lo) * ref.weights
        tab = hermite_fn_table(max_level, t)
        segs[:, :, i] = np.einsum("k,ik,jk->ij", w, tab, tab)
    # cumulative from the right: lambda(x_i) = sum of segments beyond x_i
    cum = np.cumsum(segs[:, :, ::-1], axis=2)[:, :, ::-1]
    vals = cum[:, :, :xi.size]
    return OverlapTable(xi_grid=xi, max_level=max_level, values=vals)

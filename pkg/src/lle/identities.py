"""Executable verification of the substitution-chain and special-function identities.

Each verifier checks one identity pointwise at given inputs and returns a
result carrying the inputs and the achieved error, so a failing case is
immediately reproducible. The randomized suites draw per-case seeds from one
master seed and report as JSON.

The change-of-variables checks run in the inverse direction: starting from
the final variables (xi, tau) they reconstruct the original ones and compare
both sides, which turns the interleaved integral renamings into a pure
pointwise algebra check. For the branch q = m-1 (hence for all of m = 2) the
xi-shift is tau_1/2 rather than (tau_1 + tau_{m-1})/2; with that reading every
identity holds for all m >= 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError
from .landau import symplectic
from .specfun import adaptive_quad, hermite_poly_normalized, laguerre

M_CAP = 8  # randomized suites stop here: all index-branch patterns occur by m = 8


# ---------------------------------------------------------------------------
# integer substitution data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubstitutionPlan:
    """Integer matrices of the sector-q substitution chain for chain length m."""

    m: int
    q: int

    def __post_init__(self):
        if self.m < 2:
            raise DomainError(f"chain length must be >= 2, got {self.m}")
        if not 1 <= self.q <= self.m - 1:
            raise DomainError(f"branch index must lie in 1..{self.m - 1}")

    @property
    def skew(self) -> np.ndarray:
        """S with -1 above, 0 on, +1 below the diagonal ((m-1) x (m-1))."""
        m = self.m
        s = np.zeros((m - 1, m - 1), dtype=object)
        for i in range(m - 1):
            for j in range(m - 1):
                s[i, j] = -1 if i < j else (1 if i > j else 0)
        return s

    @property
    def a_matrix(self) -> np.ndarray:
        m, q = self.m, self.q
        a = np.zeros((m - 1, m - 1), dtype=object)
        for i in range(1, m):
            for j in range(1, m):
                if 1 <= i <= j <= q or q + 1 <= j <= i:
                    a[i - 1, j - 1] = 1
        return a

    @property
    def a_inverse(self) -> np.ndarray:
        m, q = self.m, self.q
        ai = np.zeros((m - 1, m - 1), dtype=object)
        for i in range(1, m):
            ai[i - 1, i - 1] = 1
        for i in range(1, q):
            ai[i - 1, i] = -1
        for i in range(q + 2, m):
            ai[i - 1, i - 2] = -1
        return ai

    @property
    def sign_flip(self) -> np.ndarray:
        d = [1] * self.q + [-1] * (self.m - 1 - self.q)
        return np.diag(np.array(d, dtype=object))

    def det_a(self) -> int:
        """Determinant of A by fraction-free (Bareiss) elimination, exact ints."""
        a = [[int(v) for v in row] for row in self.a_matrix]
        n = len(a)
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[-1][-1]

    def xi_shift(self, tau: np.ndarray) -> float:
        # for q = m-1 the negative block is empty and t_m collapses to tau_1
        if self.q == self.m - 1:
            return 0.5 * float(tau[0])
        return 0.5 * float(tau[0] + tau[-1])

    def original_variables(self, xi: float, tau: np.ndarray,
                           undo_tau_shift: bool = False):
        """Invert the chain: final (xi, tau) -> original (xi0, t)."""
        tau = np.asarray(tau, dtype=float)
        if tau.size != self.m - 1:
            raise DomainError(f"tau must have {self.m - 1} components")
        if undo_tau_shift:
            tau = tau - xi
        flip = np.array([1.0] * self.q + [-1.0] * (self.m - 1 - self.q))
        ainv = np.asarray(self.a_inverse, dtype=float)
        t = ainv @ (flip * tau)
        xi0 = -xi - self.xi_shift(tau)
        return xi0, t


@dataclass
class VerifyResult:
    """Outcome of one identity check with reproduction data."""

    ok: bool
    max_error: float
    tolerance: float
    inputs: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def _result(err: float, tol: float, **inputs) -> VerifyResult:
    clean = {k: (v.tolist() if isinstance(v, np.ndarray) else v)
             for k, v in inputs.items()}
    return VerifyResult(ok=bool(err <= tol), max_error=float(err),
                        tolerance=float(tol), inputs=clean)


# ---------------------------------------------------------------------------
# chain-of-kernels phase and frame identities
# ---------------------------------------------------------------------------

def verify_phase_telescoping(m: int, x, ys) -> VerifyResult:
    """Telescoped symplectic phase of an m-step kernel chain.

    sum_i <x_i|J x_{i+1}> over the cycle equals the y-only double sum; for
    m = 2 both sides vanish.
    """
    if m < 2:
        raise DomainError(f"chain length must be >= 2, got {m}")
    x = np.asarray(x, dtype=float)
    ys = np.asarray(ys, dtype=float).reshape(m - 1, 2)
    pts = [x]
    for i in range(m - 1):
        pts.append(pts[-1] - ys[i])
    pts.append(x)  # x_m := x
    lhs = sum(symplectic(pts[i], pts[i + 1]) for i in range(m))
    rhs = 0.0
    for i in range(1, m - 1):
        rhs += symplectic(ys[:i].sum(axis=0), ys[i])
    scale = 1.0 + float(np.max(np.abs(ys))) ** 2 + float(np.max(np.abs(x))) ** 2
    return _result(abs(lhs - rhs), 1e-12 * scale, m=m, x=x, ys=ys,
                   lhs=lhs, rhs=rhs)


def verify_local_frame_reduction(ys, normal) -> VerifyResult:
    """Tangent/normal decomposition y = -z Jn + t n and the skew phase form."""
    ys = np.asarray(ys, dtype=float).reshape(-1, 2)
    m = ys.shape[0] + 1
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    jn = np.array([n[1], -n[0]])  # J n
    z = -ys @ jn
    t = ys @ n
    err = 0.0
    for i in range(m - 1):
        rec = -z[i] * jn + t[i] * n
        err = max(err, float(np.max(np.abs(rec - ys[i]))))
        err = max(err, abs(float(ys[i] @ ys[i]) - (z[i] ** 2 + t[i] ** 2)))
    lhs = 0.0
    for i in range(1, m - 1):
        lhs += symplectic(ys[:i].sum(axis=0), ys[i])
    plan = SubstitutionPlan(m=m, q=1)
    s = np.asarray(plan.skew, dtype=float)
    rhs = float(z @ (s @ t))
    err = max(err, abs(lhs - rhs))
    scale = 1.0 + float(np.max(np.abs(ys))) ** 2
    return _result(err, 1e-12 * scale, m=m, ys=ys, normal=n)


# ---------------------------------------------------------------------------
# the B.1/B.2 substitution-chain identities
# ---------------------------------------------------------------------------

def _chain_data(plan: SubstitutionPlan, t: np.ndarray):
    s = np.asarray(plan.skew, dtype=float)
    big_t = s @ t
    big_t_full = np.concatenate([big_t, [0.0]])          # T_m := 0
    t_full = np.concatenate([t, [t.sum()]])              # t_m := sum t_i
    return big_t_full, t_full


def verify_exponent_identity(m: int, q: int, xi: float, tau) -> VerifyResult:
    """Quadratic-form identity of the exponent under the substitution chain.

    m xi0^2 + xi0 sum T_i + (sum T_i^2)/4 + (sum t_i^2)/4, evaluated at the
    reconstructed original variables, must equal xi^2 + sum_j (xi + tau_j)^2.
    """
    plan = SubstitutionPlan(m=m, q=q)
    tau = np.asarray(tau, dtype=float)
    xi0, t = plan.original_variables(xi, tau)
    big_t, t_full = _chain_data(plan, t)
    lhs = (m * xi0 ** 2 + xi0 * big_t.sum()
           + 0.25 * np.sum(big_t ** 2) + 0.25 * np.sum(t_full ** 2))
    rhs = xi ** 2 + float(np.sum((xi + tau) ** 2))
    scale = 1.0 + abs(lhs) + abs(rhs)
    return _result(abs(lhs - rhs), 1e-11 * scale, m=m, q=q, xi=xi, tau=tau,
                   lhs=float(lhs), rhs=float(rhs), xi0=xi0, t=t)


def verify_T_in_tau(m: int, q: int, tau) -> VerifyResult:
    """Closed four-branch forms of T_j in the tau variables (q <= m-2).

    Checks the plain, post-sign-flip, and post-shift (tilde) tables, plus the
    tilde-t table.
    """
    if not 1 <= q <= m - 2:
        raise DomainError("the four-branch tables assume 1 <= q <= m-2")
    plan = SubstitutionPlan(m=m, q=q)
    tau = np.asarray(tau, dtype=float)
    ainv = np.asarray(plan.a_inverse, dtype=float)
    s = np.asarray(plan.skew, dtype=float)
    flip = np.array([1.0] * q + [-1.0] * (m - 1 - q))
    err = 0.0

    t_plain = ainv @ tau
    big_plain = s @ t_plain
    t_flip = ainv @ (flip * tau)
    big_flip = s @ t_flip
    shift = tau[0] + tau[-1]
    for j in range(1, m):
        tj = tau[j - 1]
        if j <= q - 1:
            plain = tau[0] - tj - tau[j] - tau[-1]
            flp = tau[0] - tj - tau[j] + tau[-1]
            tilde_t = tau[j - 1] - tau[j]
        elif j == q:
            plain = tau[0] - tau[q - 1] - tau[-1]
            flp = tau[0] - tau[q - 1] + tau[-1]
            tilde_t = tau[q - 1]
        elif j == q + 1:
            plain = tau[0] + tau[q] - tau[-1]
            flp = tau[0] - tau[q] + tau[-1]
            tilde_t = -tau[q]
        else:
            plain = tau[0] + tau[j - 2] + tau[j - 1] - tau[-1]
            flp = tau[0] - tau[j - 2] - tau[j - 1] + tau[-1]
            tilde_t = tau[j - 2] - tau[j - 1]
        err = max(err, abs(big_plain[j - 1] - plain))
        err = max(err, abs(big_flip[j - 1] - flp))
        err = max(err, abs(big_flip[j - 1] - shift - (flp - shift)))
        err = max(err, abs(t_flip[j - 1] - tilde_t))
    scale = 1.0 + float(np.max(np.abs(tau)))
    return _result(err, 1e-12 * scale, m=m, q=q, tau=tau)


def _claimed_laguerre_argument(plan: SubstitutionPlan, j: int, omega, xi: float,
                               tau: np.ndarray):
    m, q = plan.m, plan.q
    root = lambda v: omega - 2.0j * v
    if j <= q - 1:
        return root(tau[j - 1]) * root(tau[j])
    if j == q:
        return root(xi) * root(tau[q - 1])
    if j == m:
        # for q = m-1 the closing factor supplies the second xi root
        if q == m - 1:
            return root(xi) * root(tau[0])
        return root(tau[0]) * root(tau[m - 2])
    if j == q + 1:
        return root(xi) * root(tau[q])
    return root(tau[j - 2]) * root(tau[j - 1])


def verify_laguerre_argument_maps(m: int, q: int, omega, xi: float,
                                  tau) -> VerifyResult:
    """Product forms of the Laguerre arguments after the full chain.

    Factor j's pre-substitution argument (omega + i(2 xi0 + T_j))^2 + t_j^2,
    evaluated at the reconstructed originals (including the final global
    tau -> tau - xi shift), must equal the claimed two-root product.
    """
    plan = SubstitutionPlan(m=m, q=q)
    tau = np.asarray(tau, dtype=float)
    xi0, t = plan.original_variables(xi, tau, undo_tau_shift=True)
    big_t, t_full = _chain_data(plan, t)
    err = 0.0
    scale = 1.0 + abs(complex(omega)) ** 2 + float(np.max(np.abs(tau))) ** 2 + xi * xi
    for j in range(1, m + 1):
        pre = (omega + 1j * (2.0 * xi0 + big_t[j - 1])) ** 2 + t_full[j - 1] ** 2
        claimed = _claimed_laguerre_argument(plan, j, omega, xi, tau)
        err = max(err, abs(pre - claimed))
    return _result(err, 1e-11 * scale, m=m, q=q, omega=complex(omega), xi=xi,
                   tau=tau)


# ---------------------------------------------------------------------------
# special-function identities
# ---------------------------------------------------------------------------

def verify_hermite_identity(ell: int, xi: float, tau: float) -> VerifyResult:
    """Gaussian integral of a two-root Laguerre argument against Hermite pairs.

    (2pi)^{-1/2} integral of L_ell((w-2i xi)(w-2i tau)/2) e^{-w^2/4} dw equals
    sqrt(2) H_ell(xi) H_ell(tau) / (2^ell ell!); relative tolerance 1e-9 with
    an absolute floor near the Hermite zeros.
    """
    if ell > 12:
        raise DomainError("identity quadrature is tuned for ell <= 12")
    # sqrt(2) H_l(xi) H_l(tau) / (2^l l!) in the normalized basis
    hx = hermite_poly_normalized(ell, xi)
    ht = hermite_poly_normalized(ell, tau)
    rhs = math.sqrt(2.0) * hx * ht
    scale = math.sqrt(2.0) * (1.0 + abs(hx)) * (1.0 + abs(ht))

    def integrand(w):
        z = (w - 2j * xi) * (w - 2j * tau) / 2.0
        return laguerre(ell, 0, z) * np.exp(-w * w / 4.0)

    # Horner cancellation inside the Laguerre polynomial caps the achievable
    # pointwise accuracy at ~eps * |z|^ell / ell!; hand that to the quadrature
    wg = np.linspace(-30.0, 30.0, 601)
    env = ((np.abs(wg) + 2 * abs(xi)) * (np.abs(wg) + 2 * abs(tau)) / 2.0) ** ell \
        / math.factorial(ell) * np.exp(-wg * wg / 4.0)
    noise = 2e-16 * float(np.max(env))
    val = adaptive_quad(integrand, -30.0, 30.0, tol=1e-12 * scale, noise=noise)
    lhs = complex(val) / math.sqrt(2.0 * math.pi)
    tol = max(1e-9 * abs(rhs), 1e-10 * scale)
    return _result(abs(lhs - rhs), tol, ell=ell, xi=xi, tau=tau,
                   lhs=[lhs.real, lhs.imag], rhs=rhs)


def verify_mehler(xi: float, tau: float, t: float,
                  n_cap: int = 200) -> VerifyResult:
    """Hermite product generating function against its Gaussian closed form.

    Partial sums run in the normalized-Hermite basis (term_l = htilde_l(xi)
    htilde_l(tau) t^l) until they stabilize; requires |t| < 1 and caps the
    series length.
    """
    if not abs(t) < 1.0:
        raise DomainError(f"Mehler series needs |t| < 1, got {t}")
    closed = (1.0 - t * t) ** -0.5 * math.exp(
        2.0 * xi * tau * t / (1.0 - t) - t * t * (xi + tau) ** 2 / (1.0 - t * t))
    # normalized recurrence, so H_l(x) t^l / (2^l l!)-type terms stay bounded
    h_prev_x, h_prev_t = 1.0, 1.0
    h_x, h_t = math.sqrt(2.0) * xi, math.sqrt(2.0) * tau
    total = h_prev_x * h_prev_t
    mass = abs(total)  # cancellation mass: sum of |terms|
    power = 1.0
    small_run = 0
    converged = False
    for ell in range(1, n_cap + 1):
        power *= t
        total += h_x * h_t * power
        mass += abs(h_x * h_t * power)
        # h-tilde oscillates in ell, so one small term proves nothing; demand
        # a run of six before trusting the tail to be gone
        if abs(h_x * h_t * power) < 1e-13 * max(1.0, abs(total)) and ell > 8:
            small_run += 1
            if small_run >= 6:
                converged = True
                break
        else:
            small_run = 0
        cx = math.sqrt(2.0 / (ell + 1)) * xi * h_x - math.sqrt(ell / (ell + 1.0)) * h_prev_x
        ct = math.sqrt(2.0 / (ell + 1)) * tau * h_t - math.sqrt(ell / (ell + 1.0)) * h_prev_t
        h_prev_x, h_x = h_x, cx
        h_prev_t, h_t = h_t, ct
    if not converged:
        raise NumericError(f"Mehler series not converged within {n_cap} terms "
                           f"at (xi={xi}, tau={tau}, t={t})")
    err = abs(total - closed)
    # the accumulated-roundoff floor 1e-15 * mass is the best doubles can do
    return _result(err, 1e-9 * max(1.0, abs(closed)) + 1e-15 * mass,
                   xi=xi, tau=tau, t=t, series=total, closed=closed)


def verify_christoffel_darboux(n: int, tau: float, taup: float) -> VerifyResult:
    """Direct normalized Hermite sum against the divided-difference quotient."""
    if n > 20:
        raise DomainError("Christoffel-Darboux check capped at n = 20")
    direct = sum(hermite_poly_normalized(ell, tau) * hermite_poly_normalized(ell, taup)
                 for ell in range(n + 1))
    if tau == taup:
        hn = hermite_poly_normalized(n, tau)
        hn1 = hermite_poly_normalized(n + 1, tau)
        hn2 = hermite_poly_normalized(n + 2, tau)
        quot = (n + 1.0) * hn1 * hn1 - math.sqrt((n + 1.0) * (n + 2.0)) * hn * hn2
    else:
        quot = math.sqrt((n + 1.0) / 2.0) * (
            hermite_poly_normalized(n, taup) * hermite_poly_normalized(n + 1, tau)
            - hermite_poly_normalized(n, tau) * hermite_poly_normalized(n + 1, taup)
        ) / (tau - taup)
    err = abs(direct - quot)
    return _result(err, 1e-10 * max(1.0, abs(direct)), n=n, tau=tau, taup=taup,
                   direct=direct, quotient=quot)


def laguerre_sum_relation_error(n: int, t) -> float:
    """Pointwise error of sum_{l<=n} L_l = L_n^{(1)}, scaled to magnitude.

    The alternating explicit sums cancel ~t^n/n!-sized terms down to O(1)
    values on [0, 40], so the meaningful pointwise error is relative to the
    cancellation mass sum_j |c_j| t^j, not to the tiny results.
    """
    t = np.asarray(t, dtype=float)
    total = sum(laguerre(ell, 0, t) for ell in range(n + 1))
    rel = laguerre(n, 1, t)
    mass = sum(math.comb(n + 1, n - j) / math.factorial(j) * t ** j
               for j in range(n + 1))
    scale = np.maximum(1.0, np.maximum(np.abs(rel), mass))
    return float(np.max(np.abs(total - rel) / scale))


# ---------------------------------------------------------------------------
# randomized suites
# ---------------------------------------------------------------------------

def _suite_phase(rng) -> VerifyResult:
    m = int(rng.integers(2, M_CAP + 1))
    return verify_phase_telescoping(m, rng.normal(size=2),
                                    rng.normal(size=(m - 1, 2)))


def _suite_frame(rng) -> VerifyResult:
    m = int(rng.integers(2, M_CAP + 1))
    ang = rng.uniform(0, 2 * math.pi)
    return verify_local_frame_reduction(rng.normal(size=(m - 1, 2)),
                                        (math.cos(ang), math.sin(ang)))


def _suite_exponent(rng) -> VerifyResult:
    m = int(rng.integers(2, M_CAP + 1))
    q = int(rng.integers(1, m))
    return verify_exponent_identity(m, q, float(rng.normal()),
                                    rng.uniform(0.05, 3.0, size=m - 1))


def _suite_t_tables(rng) -> VerifyResult:
    m = int(rng.integers(3, M_CAP + 1))
    q = int(rng.integers(1, m - 1))
    return verify_T_in_tau(m, q, rng.uniform(0.05, 3.0, size=m - 1))


def _suite_laguerre_maps(rng) -> VerifyResult:
    m = int(rng.integers(2, M_CAP + 1))
    q = int(rng.integers(1, m))
    omega = complex(rng.normal(), rng.normal())
    return verify_laguerre_argument_maps(m, q, omega, float(rng.normal()),
                                         rng.uniform(0.05, 3.0, size=m - 1))


def _suite_hermite_identity(rng) -> VerifyResult:
    ell = int(rng.integers(0, 13))
    return verify_hermite_identity(ell, float(rng.uniform(-4, 4)),
                                   float(rng.uniform(-4, 4)))


def _suite_mehler(rng) -> VerifyResult:
    return verify_mehler(float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3)),
                         float(rng.uniform(-0.8, 0.8)))


def _suite_cd(rng) -> VerifyResult:
    n = int(rng.integers(0, 21))
    tau = float(rng.uniform(-3, 3))
    if rng.random() < 0.15:
        taup = tau
    else:
        taup = float(rng.uniform(-3, 3))
    return verify_christoffel_darboux(n, tau, taup)


SUITES = {
    "phase-telescoping": _suite_phase,
    "local-frame": _suite_frame,
    "exponent": _suite_exponent,
    "t-tables": _suite_t_tables,
    "laguerre-maps": _suite_laguerre_maps,
    "hermite-identity": _suite_hermite_identity,
    "mehler": _suite_mehler,
    "christoffel-darboux": _suite_cd,
}


def run_suite(name: str, cases: int = 1000, seed: int = 0) -> dict:
    """Run one randomized suite; returns a JSON-ready report."""
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    gen = SUITES[name]
    failures = []
    max_err = 0.0
    max_ratio = 0.0
    for case in range(cases):
        rng = np.random.default_rng([seed, case])
        res = gen(rng)
        max_err = max(max_err, res.max_error)
        max_ratio = max(max_ratio, res.max_error / max(res.tolerance, 1e-300))
        if not res.ok:
            failures.append(res.inputs | {"max_error": res.max_error,
                                          "tolerance": res.tolerance,
                                          "case": case})
    return {"identity": name, "cases": cases, "seed": seed,
            "failures": failures, "max_error": max_err,
            "max_error_over_tolerance": max_ratio,
            "passed": not failures}


def run_all_suites(cases: int = 1000, seed: int = 0) -> dict:
    reports = {name: run_suite(name, cases=cases, seed=seed) for name in SUITES}
    return {"suites": reports,
            "passed": all(r["passed"] for r in reports.values())}


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, default=float)

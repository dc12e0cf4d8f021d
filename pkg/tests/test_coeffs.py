import math

import numpy as np
import pytest
from scipy.special import erfc

from lle import coeffs as cf
from lle import specfun as sf
from lle.errors import ConsistencyError, DomainError
from lle.landau import LevelSelector, k_kernel_matrix

import oracles


# ---------------------------------------------------------------------------
# Renyi entropy function
# ---------------------------------------------------------------------------

def test_renyi_endpoints_and_closed_values():
    for alpha in (0.5, 1.0, 2.0, 3.7):
        assert cf.renyi_h(alpha, 0.0) == 0.0
        assert cf.renyi_h(alpha, 1.0) == 0.0
    assert cf.renyi_h(1.0, 0.5) == pytest.approx(math.log(2.0), abs=1e-15)
    assert cf.renyi_h(2.0, 0.25) == pytest.approx(math.log(8.0 / 5.0), abs=1e-15)


def test_renyi_limit_branch():
    t = np.linspace(0.01, 0.99, 23)
    near = cf.renyi_h(1.0 + 1e-9, t)
    exact = cf.renyi_h(1.0, t)
    np.testing.assert_allclose(near, exact, atol=1e-8)


def test_renyi_domain_error():
    with pytest.raises(DomainError):
        cf.renyi_h(1.0, 1.1)
    with pytest.raises(DomainError):
        cf.renyi_h(0.0, 0.5)
    # within the 1e-10 slack is fine
    assert cf.renyi_h(1.0, 1.0 + 5e-11) == 0.0


# ---------------------------------------------------------------------------
# SpectralFunction admission
# ---------------------------------------------------------------------------

def test_spectral_function_rejects_nonvanishing_origin():
    with pytest.raises(DomainError):
        cf.SpectralFunction(fn=lambda t: t + 1.0, value_at_one=2.0,
                            endpoint_exponent=1.0)


def test_spectral_function_holder_fit():
    f = cf.SpectralFunction.renyi(0.5)
    assert f.endpoint_exponent == 0.5
    assert math.isfinite(f.holder_constant) and f.holder_constant > 0
    g = cf.SpectralFunction.monomial(1)
    assert g.holder_constant == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        cf.SpectralFunction.monomial(0)


def test_spectral_function_spec_parsing():
    assert cf.spectral_function_from_spec("renyi:2").label == "renyi:2"
    assert cf.spectral_function_from_spec("monomial:3").label == "monomial:3"
    assert cf.spectral_function_from_spec("gtilde").kind == "gtilde"
    with pytest.raises(DomainError):
        cf.spectral_function_from_spec("fourier:2")


# ---------------------------------------------------------------------------
# Gram matrix and spectrum
# ---------------------------------------------------------------------------

def test_gram_rank_one_case():
    g = cf.gram_matrix(0, 0.4)
    assert g.shape == (1, 1)
    assert g[0, 0] == pytest.approx(sf.lambda_ell(0, 0.4), abs=1e-13)


def test_gram_identity_at_far_left():
    g = cf.gram_matrix(3, -20.0)
    assert np.max(np.abs(g - np.eye(4))) < 1e-10


def test_gram_spectrum_invariants():
    for xi in (-3.0, 0.0, 1.7):
        spec = cf.gram_spectrum(3, xi)
        vals = spec.eigenvalues
        assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
        direct = sum(sf.lambda_ell(ell, xi) for ell in range(4))
        assert vals.sum() == pytest.approx(direct, abs=1e-10)


def _nystrom_k_eigs(n, xi, nodes=200):
    # upper limit as in the occupation integrals: max(xi, 0) + 10
    rule = sf.gauss_legendre(nodes, xi, max(xi, 0.0) + 10.0)
    kern = k_kernel_matrix(n, xi, rule.nodes)
    sq = np.sqrt(rule.weights)
    mat = sq[:, None] * kern * sq[None, :]
    return np.linalg.eigvalsh(mat)[::-1][: n + 1]


def test_gram_vs_nystrom_oracle():
    vals = cf.gram_spectrum(2, 0.3).eigenvalues
    nys = _nystrom_k_eigs(2, 0.3, nodes=200)
    np.testing.assert_allclose(vals, nys, atol=1e-8)


def test_gram_vs_nystrom_across_grid():
    # tr f(K) from gram eigenvalues vs a 300-node Nystrom diagonalization
    f = cf.SpectralFunction.renyi(1.0)
    for n in range(5):
        for xi in (-6.0, -1.5, 0.0, 2.0, 6.0):
            mu = cf.gram_spectrum(n, xi).eigenvalues
            nys = np.clip(_nystrom_k_eigs(n, xi, nodes=300), 0.0, 1.0)
            tr_gram = float(np.sum(f(mu)))
            tr_nys = float(np.sum(f(nys)))
            assert tr_gram == pytest.approx(tr_nys, abs=1e-7)


def test_gram_eigenvalues_vs_jacobi_oracle():
    g = cf.gram_matrix(3, 0.8)
    ours = cf.gram_spectrum(3, 0.8).eigenvalues
    jac = oracles.jacobi_eigvalsh(g)
    np.testing.assert_allclose(ours, jac, atol=1e-11)


# ---------------------------------------------------------------------------
# coefficient integrals
# ---------------------------------------------------------------------------

def test_m_ell_vanishes_for_identity():
    assert cf.coeff_M_ell(0, cf.SpectralFunction.monomial(1)) == pytest.approx(0.0, abs=1e-12)
    assert cf.coeff_M_le_n(2, cf.SpectralFunction.monomial(1)) == pytest.approx(0.0, abs=1e-11)


def test_m0_h1_paper_value():
    value = cf.coeff_M_ell(0, cf.SpectralFunction.renyi(1.0))
    assert value == pytest.approx(0.203, abs=2e-3)


def test_m0_h1_convergence_digits():
    # our own convergence study pins further digits than the three published
    v_fine, err = cf.coeff_with_error(LevelSelector.single(0),
                                      cf.SpectralFunction.renyi(1.0))
    assert err < 1e-10
    assert v_fine == pytest.approx(0.2032908132265638, abs=1e-12)


def test_m0_t2_dense_grid_oracle():
    # sign is trivial (lambda^2 - lambda <= 0), magnitude from a trapezoid
    # oracle on lambda_0 = erfc/2
    value = cf.coeff_M_ell(0, cf.SpectralFunction.monomial(2))
    assert value < 0.0
    xi = np.linspace(-10.0, 10.0, 400001)
    lam = 0.5 * erfc(xi)
    dense = np.trapezoid(lam ** 2 - lam, xi) / (2 * math.pi)
    assert value == pytest.approx(dense, abs=1e-9)


def test_m_le_0_equals_m_0():
    for alpha in (0.5, 1.0, 2.0):
        f = cf.SpectralFunction.renyi(alpha)
        assert cf.coeff_M_le_n(0, f) == pytest.approx(cf.coeff_M_ell(0, f),
                                                      abs=1e-9)


def test_m_le_1_h1_series_sandwich_oracle():
    # polynomial approximation of h1 through its positive series
    # h1(t) = sum_j (1/j) [t^j (1-t) + (1-t)^j t], truncated at J, evaluated
    # through the trace-moment field; the truncation tail is bounded by
    # (1/(J+1)) integral of tr[K^{J+1} + (1-K)^{J+1} K]
    n = 1
    target = cf.coeff_M_le_n(n, cf.SpectralFunction.renyi(1.0))
    grid = cf.xi_grid(n, q=0.9, c_holder=4.0)
    mu = cf.gram_eigen_field(n, grid)
    J = 2000
    approx = np.zeros(mu.shape[0])
    for j in range(1, J + 1):
        term = mu ** j * (1.0 - mu) + (1.0 - mu) ** j * mu
        approx += term.sum(axis=1) / j
    series_value = float(np.dot(grid.weights, approx)) / (2 * math.pi)
    tail = (mu ** (J + 1) + (1.0 - mu) ** (J + 1) * mu).sum(axis=1)
    tail_bound = float(np.dot(grid.weights, tail)) / (2 * math.pi) / (J + 1)
    assert abs(target - series_value) <= tail_bound + 1e-8
    assert tail_bound < 5e-3


def test_monotone_quadrature_convergence():
    # halving the panel width changes M by less than the reported estimate
    f = cf.SpectralFunction.renyi(1.0)
    sel = LevelSelector.upto(1)
    value, err = cf.coeff_with_error(sel, f)
    finer = cf.xi_grid(1, q=0.9, c_holder=4.0, panel_width=0.125)
    v_finer = cf._m_le_n_on_grid(1, f, finer)
    assert abs(v_finer - value) <= err + 1e-14


def test_positivity_of_entropy_coefficients():
    for n in range(4):
        for alpha in (0.5, 1.0, 2.0):
            assert cf.coeff_M_le_n(n, cf.SpectralFunction.renyi(alpha)) > 0.0


def test_trace_norm_gaussian_tail_bound():
    # ||f(K) - f(1) K||_1 from eigenvalues decays like exp(-0.9 q xi^2)
    for f in (cf.SpectralFunction.gtilde(), cf.SpectralFunction.renyi(1.0)):
        rate = 0.9 * min(f.endpoint_exponent, 1.0)
        grid = np.linspace(2.0, 6.0, 17)
        norms = []
        for xi in grid:
            mu = cf.gram_spectrum(2, xi).eigenvalues
            norms.append(float(np.sum(np.abs(np.asarray(f(mu))
                                             - f.value_at_one * mu))))
        ratio = np.asarray(norms) * np.exp(rate * grid * grid)
        peak = int(np.argmax(ratio))
        assert peak < grid.size - 1
        assert np.all(np.diff(ratio[peak:]) <= 1e-12)


# ---------------------------------------------------------------------------
# trace moments and moment coefficients
# ---------------------------------------------------------------------------

def test_trace_moment_rank_one_power():
    for m in (1, 2, 5):
        a, b = cf.trace_moment_K(0, 0.3, m)
        lam = sf.lambda_ell(0, 0.3)
        assert a == pytest.approx(lam ** m, abs=1e-12)
        assert b == pytest.approx(lam ** m, abs=1e-12)


def test_trace_moment_first_is_occupation_sum():
    a, b = cf.trace_moment_K(2, -0.4, 1)
    direct = sum(sf.lambda_ell(ell, -0.4) for ell in range(3))
    assert a == pytest.approx(direct, abs=1e-10)
    assert b == pytest.approx(direct, abs=1e-10)


def test_trace_moment_routes_agree():
    a, b = cf.trace_moment_K(2, 0.7, 3)
    assert a == pytest.approx(b, abs=1e-10)


def test_trace_moment_refuses_blowup():
    with pytest.raises(DomainError):
        cf.trace_moment_K(3, 0.0, 12)


def test_poly_boundary_coeff():
    assert cf.poly_boundary_coeff(2, 1) == pytest.approx(0.0, abs=1e-12)
    assert cf.poly_boundary_coeff(0, 2) == pytest.approx(
        cf.coeff_M_ell(0, cf.SpectralFunction.monomial(2)), abs=1e-10)
    # dense-grid oracle for level 1, fourth moment: lambda_1 by reverse
    # cumulative trapezoid of psi_1^2 on a fine grid
    xi = np.linspace(-12.0, 12.0, 800001)
    psi2 = sf.hermite_fn(1, xi) ** 2
    h = xi[1] - xi[0]
    seg = 0.5 * (psi2[:-1] + psi2[1:]) * h
    lam = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    dense = np.trapezoid(lam ** 4 - lam, xi) / (2 * math.pi)
    assert cf.poly_boundary_coeff(1, 4) == pytest.approx(dense, abs=1e-9)


def test_clamp_violation_aborts():
    from lle.errors import NumericError
    with pytest.raises(NumericError):
        cf._clamp_spectrum(np.array([1.0 + 1e-8, 0.5]), "test")

"""Singlet pair sharing one fiber: generator, rates, kernels, witnesses.

The six-element generator is checked against a dense 16x16 Pauli
assembly with collective arm operators; the constant rotation that
block-diagonalizes it is checked for unitarity and for actually
decoupling the blocks. Witness closed forms are pinned by bisection on
the kernel entries themselves.
"""

import math

import numpy as np
import pytest

from pmdsim import (
    BellLabel,
    FiberParameters,
    PulseEnvelope,
    anticorrelated_g,
    assemble_mprime,
    block_unitary,
    chi_factor,
    common_singlet_elements,
    common_singlet_trace,
    common_spectrum,
    critical_length_common,
    evolve_common_singlet,
    evolve_common_singlet_pairs,
    input_two_state,
    make_dispersion,
    make_grid,
    negativity,
    polarization_negativity_common,
    ppt_submatrix_tests,
    traced_common_kernel,
    upsilon_factor,
    upsilon_quadrature,
    v_factors,
    xi_rates,
    WeightedOperator,
)
from pmdsim.core import PAULI

PARAMS = FiberParameters.dimensionless()
PROFILE = make_dispersion(PARAMS)

I2 = np.eye(2)
I4 = np.eye(4)
# row-major vec indices of (rho_1111, rho_1010, rho_0101, rho_0000,
# rho_1001, rho_0110) in the 16-dim polarization-element space
IDX6 = [0, 5, 10, 15, 6, 9]


def _pauli_generator_common(profile, wa, wb, wap, wbp):
    """Dense 16x16 generator with both photons coupled to one fiber."""
    fa, fb = float(profile(wa)), float(profile(wb))
    fap, fbp = float(profile(wap)), float(profile(wbp))
    e2 = profile.eta**2
    gen = np.zeros((16, 16), dtype=complex)
    cross = sum(np.kron(PAULI[i], I2) @ np.kron(I2, PAULI[i]) for i in range(3))
    for i in range(3):
        k = fa * np.kron(PAULI[i], I2) + fb * np.kron(I2, PAULI[i])
        kp = fap * np.kron(PAULI[i], I2) + fbp * np.kron(I2, PAULI[i])
        gen += e2 / 2.0 * np.kron(k, kp.T)
    drift = 3.0 * (fa**2 + fb**2) * I4 + 2.0 * fa * fb * cross
    drift_p = 3.0 * (fap**2 + fbp**2) * I4 + 2.0 * fap * fbp * cross
    gen -= e2 / 4.0 * (np.kron(drift, I4) + np.kron(I4, drift_p.T))
    return gen


def _narrowband_quadruples(rng, count, spread=0.25):
    return rng.uniform(1.0 - spread, 1.0 + spread, size=(count, 4))


def test_generator_matches_pauli_assembly():
    """assemble_mprime equals the dense generator restricted to the six
    coupled elements, and nothing leaks out of that subspace."""
    rng = np.random.default_rng(4321)
    worst_restrict = 0.0
    worst_leak = 0.0
    for wa, wb, wap, wbp in rng.uniform(0.5, 1.5, size=(100, 4)):
        gen = _pauli_generator_common(PROFILE, wa, wb, wap, wbp)
        mp = assemble_mprime(PROFILE, wa, wb, wap, wbp)
        sub = gen[np.ix_(IDX6, IDX6)].real
        worst_restrict = max(worst_restrict, float(np.max(np.abs(sub - mp))))
        off = np.delete(gen[IDX6, :], IDX6, axis=1)
        worst_leak = max(worst_leak, float(np.max(np.abs(off))))
    assert worst_restrict < 1e-12
    assert worst_leak == 0.0


def test_generator_symmetric():
    rng = np.random.default_rng(99)
    for wa, wb, wap, wbp in rng.uniform(0.5, 1.5, size=(20, 4)):
        mp = assemble_mprime(PROFILE, wa, wb, wap, wbp)
        assert np.max(np.abs(mp - mp.T)) == 0.0


def test_block_unitary_is_unitary_with_singlet_first_column():
    u = block_unitary()
    assert np.max(np.abs(u.T @ u - np.eye(6))) < 1e-14
    # first column carries the singlet pattern (0, 1, 1, 0, -1, -1)/2
    assert np.allclose(u[:, 0], np.array([0.0, 0.5, 0.5, 0.0, -0.5, -0.5]))


def test_block_unitary_decouples_generator():
    """Conjugation leaves 2x2 + 1x1 + 3x3 with zero coupling between the
    blocks, at every quadruple."""
    rng = np.random.default_rng(2024)
    u = block_unitary()
    for wa, wb, wap, wbp in rng.uniform(0.5, 1.5, size=(100, 4)):
        mp = assemble_mprime(PROFILE, wa, wb, wap, wbp)
        rot = u.T @ mp @ u
        scale = max(1.0, float(np.max(np.abs(mp))))
        off = rot.copy()
        off[:2, :2] = 0.0
        off[2, 2] = 0.0
        off[3:, 3:] = 0.0
        assert np.max(np.abs(off)) < 1e-12 * scale


def test_xi_rates_are_first_block_eigenvalues():
    rng = np.random.default_rng(7)
    u = block_unitary()
    for wa, wb, wap, wbp in rng.uniform(0.5, 1.5, size=(100, 4)):
        mp = assemble_mprime(PROFILE, wa, wb, wap, wbp)
        rot = u.T @ mp @ u
        block = rot[:2, :2]
        eig = np.sort(np.linalg.eigvalsh(block))
        xi1, xi2 = xi_rates(PROFILE, wa, wb, wap, wbp)
        scale = max(1.0, float(np.max(np.abs(mp))))
        assert abs(-xi1 - eig[0]) < 1e-12 * scale
        assert abs(-xi2 - eig[1]) < 1e-12 * scale


def test_xi_rates_are_smallest_spectrum_magnitudes_near_carrier():
    """For quadruples near the carrier the two singlet rates are the two
    smallest-magnitude eigenvalues of the full six-element generator."""
    rng = np.random.default_rng(31415)
    for wa, wb, wap, wbp in _narrowband_quadruples(rng, 100):
        mp = assemble_mprime(PROFILE, wa, wb, wap, wbp)
        mags = np.sort(np.abs(np.linalg.eigvalsh(mp)))
        xi1, xi2 = xi_rates(PROFILE, wa, wb, wap, wbp)
        scale = max(1.0, float(np.max(np.abs(mp))))
        assert np.max(np.abs(np.sort([abs(xi1), abs(xi2)]) - mags[:2])) < 1e-12 * scale


def test_xi2_vanishes_on_kernel_diagonal():
    xi1, xi2 = xi_rates(PROFILE, 1.07, 0.91, 1.07, 0.91)
    assert abs(xi2) < 1e-14
    assert xi1 > 0.0


def test_xi_rates_on_shared_rotation_manifold():
    # w_A = w_B: both photons see identical rotations, xi2 = 0 and
    # xi1 = 2 eta^2 (f - f')^2
    xi1, xi2 = xi_rates(PROFILE, 1.1, 1.1, 0.9, 0.9)
    f, fp = float(PROFILE(1.1)), float(PROFILE(0.9))
    assert xi1 == pytest.approx(2.0 * PARAMS.eta**2 * (f - fp) ** 2, rel=1e-12)
    assert abs(xi2) < 1e-14


def test_v_factors_zero_length():
    rng = np.random.default_rng(11)
    w = rng.uniform(0.7, 1.3, size=(10, 4))
    v1, v2 = v_factors(PROFILE, 0.0, w[:, 0], w[:, 1], w[:, 2], w[:, 3])
    assert np.allclose(v1, 1.0, atol=1e-15)
    assert np.allclose(v2, 0.0, atol=1e-15)


def test_v_factors_degenerate_guard():
    # fully degenerate quadruple: all frequencies equal, the first block
    # is zero and the guard branch returns (1, 0) at any length
    v1, v2 = v_factors(PROFILE, 123.0, 1.0, 1.0, 1.0, 1.0)
    assert float(v1) == 1.0
    assert float(v2) == 0.0


def test_shared_rotation_invariance_at_equal_frequencies():
    # w_A = w_B and w_A' = w_B': singlet invariance is exact at any length
    v1, v2 = v_factors(PROFILE, 57.0, 1.2, 1.2, 0.8, 0.8)
    assert float(v1) == pytest.approx(1.0, abs=1e-14)
    assert float(v2) == pytest.approx(0.0, abs=1e-14)


def test_elements_match_direct_expm():
    """Kernel elements from the spectral form equal a brute-force matrix
    exponential of the dense generator applied to the singlet input."""
    import scipy.linalg

    rng = np.random.default_rng(3)
    c = BellLabel.SINGLET.amplitudes()
    rho0 = np.outer(c.reshape(4), c.reshape(4).conj()).reshape(16)
    length = 0.6 * PARAMS.decoherence_length
    for wa, wb, wap, wbp in rng.uniform(0.7, 1.3, size=(25, 4)):
        gen = _pauli_generator_common(PROFILE, wa, wb, wap, wbp)
        out = scipy.linalg.expm(gen * length) @ rho0
        el = common_singlet_elements(PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0), PARAMS, 0.6, wa, wb, wap, wbp)
        pp = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0).amplitude_pair(wa, wb) * np.conj(
            PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0).amplitude_pair(wap, wbp)
        )
        for key, vec_idx in [("1111", 0), ("1010", 5), ("0101", 10), ("0000", 15), ("1001", 6), ("0110", 9)]:
            assert complex(el[key]) == pytest.approx(pp * out[vec_idx], abs=1e-13), key


def test_evolved_kernel_zero_length_is_singlet_input():
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    grid = make_grid(env, n_nodes=16)
    rho = evolve_common_singlet(env, PARAMS, 0.0, grid)
    ref = input_two_state(env, BellLabel.SINGLET, grid)
    assert np.max(np.abs(rho.kernel - ref.kernel)) < 1e-14


def test_evolved_kernel_validates_and_trace_stays_unity():
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    grid = make_grid(env, n_nodes=16)
    rho = evolve_common_singlet(env, PARAMS, 0.8, grid)
    rho.validate()
    assert rho.quad_trace() == pytest.approx(1.0, abs=1e-10)
    # and without materializing the rank-4 kernel, on a finer grid
    grid64 = make_grid(env, n_nodes=64)
    assert common_singlet_trace(env, PARAMS, 0.8, grid64) == pytest.approx(1.0, abs=1e-6)


def test_traced_kernel_diagonal_is_length_invariant():
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    grid = make_grid(env, n_nodes=16)
    k0 = traced_common_kernel(env, PARAMS, 0.0, grid)
    k1 = traced_common_kernel(env, PARAMS, 5.0, grid)
    n = grid.n
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    diag0 = k0[ii, jj, ii, jj]
    diag1 = k1[ii, jj, ii, jj]
    scale = float(np.max(np.abs(diag0)))
    assert np.max(np.abs(diag0 - diag1)) < 1e-13 * scale


def test_long_length_rows():
    """Limiting kernel rows at 1e3 decay times, on the three quadruple
    families with a conserved component."""
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    wa, wb = 1.06, 0.93
    keys = ("1111", "1010", "0101", "0000", "1001", "0110")

    # family 1: kernel diagonal relaxes to the depolarized pattern
    xi1, _ = xi_rates(PROFILE, wa, wb, wa, wb)
    l = 1e3 / xi1 / PARAMS.decoherence_length
    el = common_singlet_elements(env, PARAMS, l, wa, wb, wa, wb)
    pp = abs(env.amplitude_pair(wa, wb)) ** 2
    expect = dict(zip(keys, (0.25, 0.25, 0.25, 0.25, 0.0, 0.0)))
    for key in keys:
        assert abs(el[key] / pp - expect[key]) < 1e-8, key
    assert abs(el["traced"] / pp - 1.0) < 1e-10

    # family 2: both photons at one frequency, exact singlet invariance
    for l2 in (0.3, 7.3, 1e4):
        el = common_singlet_elements(env, PARAMS, l2, wa, wa, wb, wb)
        pp2 = env.amplitude_pair(wa, wa) * np.conj(env.amplitude_pair(wb, wb))
        expect2 = dict(zip(keys, (0.0, 0.5, 0.5, 0.0, -0.5, -0.5)))
        for key in keys:
            assert abs(el[key] / pp2 - expect2[key]) < 1e-13, (key, l2)

    # family 3: swapped quadruple relaxes to the negative-diagonal pattern
    xi1s, _ = xi_rates(PROFILE, wa, wb, wb, wa)
    l3 = 1e3 / xi1s / PARAMS.decoherence_length
    el = common_singlet_elements(env, PARAMS, l3, wa, wb, wb, wa)
    pp3 = env.amplitude_pair(wa, wb) * np.conj(env.amplitude_pair(wb, wa))
    expect3 = dict(zip(keys, (-0.25, 0.0, 0.0, -0.25, -0.25, -0.25)))
    for key in keys:
        assert abs(el[key] / pp3 - expect3[key]) < 1e-8, key


def test_pair_form_matches_element_evaluator():
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    pairs = np.array([[1.05, 0.95], [0.95, 1.05], [1.0, 1.0]])
    rho = evolve_common_singlet_pairs(env, PARAMS, 0.4, pairs)
    el = common_singlet_elements(env, PARAMS, 0.4, 1.05, 0.95, 0.95, 1.05)
    assert rho.kernel[0, 1, 1, 0, 0, 1] == pytest.approx(complex(el["1001"]), rel=1e-14)


def test_upsilon_closed_vs_quadrature():
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    grid = make_grid(env, n_nodes=128)
    for l in (0.1, 1.0, 10.0):
        q = upsilon_quadrature(env, PARAMS, l, grid)
        assert q == pytest.approx(upsilon_factor(5.0, 1.0, l), abs=1e-8)


def test_upsilon_dominates_chi():
    """A shared fiber decoheres polarization strictly slower than two
    independent ones at the same parameters."""
    for a in (2.0, 5.0, 20.0):
        for b in (3.0, 10.0, 40.0):
            for l in np.geomspace(1e-3, 1e3, 13):
                assert upsilon_factor(a, 1.0, float(l)) >= chi_factor(a, b, 1.0, float(l))


def test_polarization_reduction_is_werner_in_upsilon():
    """Diagonal quadrature of the evolved kernel reduces to the Werner
    family with parameter upsilon, checked on a 64-node grid."""
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    grid = make_grid(env, n_nodes=64)
    l = 3.0
    w = grid.nodes
    el = common_singlet_elements(
        env, PARAMS, l, w[:, None], w[None, :], w[:, None], w[None, :]
    )
    raw = env.amplitude_pair(w[:, None], w[None, :])
    norm = np.einsum("i,j,ij->", grid.weights, grid.weights, np.abs(raw) ** 2)

    def integrate(key):
        return complex(np.einsum("i,j,ij->", grid.weights, grid.weights, el[key])) / norm

    ups = upsilon_factor(5.0, 1.0, l)
    assert integrate("1111") == pytest.approx(0.25 * (1.0 - ups), abs=1e-7)
    assert integrate("1010") == pytest.approx(0.25 * (1.0 + ups), abs=1e-7)
    assert integrate("1001") == pytest.approx(-0.5 * ups, abs=1e-7)

    # generic negativity of that reduction equals the closed N_s
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = integrate("1111")
    rho[1, 1] = integrate("1010")
    rho[2, 2] = integrate("0101")
    rho[3, 3] = integrate("0000")
    rho[1, 2] = integrate("1001")
    rho[2, 1] = integrate("0110")
    op = WeightedOperator(matrix=rho, dims=(2, 2), parties=("A", "B"), kinds=("pol", "pol"))
    rep = polarization_negativity_common(5.0, 1.0, l)
    assert negativity(op) == pytest.approx(rep.n_s, abs=1e-7)


def test_critical_length_common_closed_form_and_crossing():
    for a in (2.0, 10.0, 300.0):
        l_crit = critical_length_common(a, 1.0)
        assert l_crit == pytest.approx(2.0 * a**2, rel=1e-15)
        assert upsilon_factor(a, 1.0, l_crit) == pytest.approx(1.0 / 3.0, rel=1e-14)
        assert polarization_negativity_common(a, 1.0, 0.999 * l_crit).n_s_raw > 0.0
        assert polarization_negativity_common(a, 1.0, 1.001 * l_crit).n_s_raw < 0.0


def test_critical_length_common_by_bisection_on_upsilon():
    a = 7.0
    lo, hi = 1e-6, 1e9
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if polarization_negativity_common(a, 1.0, mid).n_s_raw > 0.0:
            lo = mid
        else:
            hi = mid
    root = math.sqrt(lo * hi)
    assert root == pytest.approx(critical_length_common(a, 1.0), rel=1e-6)


def test_negativity_asymptote_of_narrow_difference_band():
    # alpha w0 -> infinity: upsilon -> 1 at any finite length, N_s -> 1/2
    rep = polarization_negativity_common(1e9, 1.0, 1.0)
    assert rep.n_s == pytest.approx(0.5, abs=1e-12)


def test_anticorrelated_g_threshold_and_limit():
    # undefined until exp(8 dw^2 l / w0^2) exceeds 3
    dw = 0.1
    l_thresh = math.log(3.0) / (8.0 * dw**2)
    assert anticorrelated_g(1.0, 0.999 * l_thresh, dw) is None
    assert anticorrelated_g(1.0, 1.001 * l_thresh, dw) is not None
    # long-length limit ln(4)/(4 dw^2)
    g_inf = anticorrelated_g(1.0, 1e12, dw)
    assert g_inf == pytest.approx(math.log(4.0) / (4.0 * dw**2), rel=1e-9)
    # decreasing toward it
    g1 = anticorrelated_g(1.0, 2.0 * l_thresh, dw)
    g2 = anticorrelated_g(1.0, 20.0 * l_thresh, dw)
    assert g1 > g2 > g_inf
    with pytest.raises(ValueError):
        anticorrelated_g(1.0, 1.0, 0.0)


def test_correlated_witness_ratio_closed_form():
    """Entry ratio is exp(-4 (alpha^2 - beta^2) (w_A - w_B)^2), at every
    length and at asymmetric points."""
    params = PARAMS
    for a, b in [(20.0, 5.0), (5.0, 20.0)]:
        env = PulseEnvelope.double(alpha=a, beta=b, omega0=1.0)
        for wa, wb in [(1.05, 0.95), (1.08, 1.01)]:
            expect = math.exp(-4.0 * (a**2 - b**2) * (wa - wb) ** 2)
            for l in (0.05, 0.8, 12.0):
                rep = ppt_submatrix_tests(env, params, l, wa, wb)
                assert rep.correlated_ratio == pytest.approx(expect, rel=1e-10)
                assert rep.correlated_entangled == (a > b)


def test_anticorrelated_witness_flip_matches_closed_threshold():
    """Bisect the raw entry verdict in beta; the flip point lands on
    beta^2 = alpha^2 + g(L)."""
    a = 5.0
    dw = 0.35
    wa, wb = 1.0 + dw / 2.0, 1.0 - dw / 2.0
    for l in (8.0, 25.0):
        g = anticorrelated_g(1.0, l, wa - wb)
        assert g is not None
        b_star = math.sqrt(a**2 + g)

        def entangled(b):
            env = PulseEnvelope.double(alpha=a, beta=b, omega0=1.0)
            return ppt_submatrix_tests(env, PARAMS, l, wa, wb).anticorrelated_verdict == "entangled"

        lo, hi = b_star * 0.5, b_star * 2.0
        assert not entangled(lo) and entangled(hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if entangled(mid):
                hi = mid
            else:
                lo = mid
        assert 0.5 * (lo + hi) == pytest.approx(b_star, rel=1e-8)


def test_witness_tri_state():
    env = PulseEnvelope.double(alpha=5.0, beta=40.0, omega0=1.0)
    dw = 0.1
    wa, wb = 1.05, 0.95
    l_thresh = math.log(3.0) / (8.0 * dw**2)
    rep = ppt_submatrix_tests(env, PARAMS, 0.5 * l_thresh, wa, wb)
    assert rep.anticorrelated_verdict == "inconclusive"
    assert rep.anticorrelated_witness is None and rep.g_l is None
    rep = ppt_submatrix_tests(env, PARAMS, 4.0 * l_thresh, wa, wb)
    assert rep.anticorrelated_verdict == "entangled"
    assert rep.anticorrelated_witness > 0.0
    weak = PulseEnvelope.double(alpha=5.0, beta=5.05, omega0=1.0)
    rep = ppt_submatrix_tests(weak, PARAMS, 4.0 * l_thresh, wa, wb)
    assert rep.anticorrelated_verdict == "not-witnessed"
    assert rep.anticorrelated_witness < 0.0


def test_ppt_submatrix_tests_input_guards():
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    single = PulseEnvelope.single(kappa=0.1, omega0=1.0)
    with pytest.raises(ValueError):
        ppt_submatrix_tests(single, PARAMS, 1.0, 1.05, 0.95)
    with pytest.raises(ValueError):
        ppt_submatrix_tests(env, PARAMS, 1.0, 1.0, 1.0)
    quad = FiberParameters(eta=2.0, gamma=1.0, omega0=1.0, sigma2=0.3)
    with pytest.raises(ValueError, match="linear"):
        ppt_submatrix_tests(env, quad, 1.0, 1.05, 0.95, dispersion=make_dispersion(quad, "quadratic"))


def test_spectrum_record_consistent_with_xi():
    spec = common_spectrum(PROFILE, 1.1, 0.9, 1.03, 0.97)
    xi1, xi2 = xi_rates(PROFILE, 1.1, 0.9, 1.03, 0.97)
    assert spec.xi1 == pytest.approx(float(xi1), rel=1e-14)
    assert spec.xi2 == pytest.approx(float(xi2), rel=1e-14)
    assert spec.v3.shape == (3, 3)
    assert np.max(np.abs(spec.v3 - spec.v3.T)) == 0.0

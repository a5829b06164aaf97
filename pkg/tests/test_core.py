"""Shared types: parameters, profiles, grids, envelopes, densities."""

import math

import numpy as np
import pytest

from pmdsim import (
    BellLabel,
    FiberParameters,
    FrequencyGrid,
    PulseEnvelope,
    input_single_state,
    input_two_state,
    make_dispersion,
    make_grid,
)
from pmdsim.core import PAULI


def test_pauli_algebra():
    ident = np.eye(2)
    for i in range(3):
        assert np.allclose(PAULI[i] @ PAULI[i], ident)
        assert np.allclose(PAULI[i], PAULI[i].conj().T)
    # sigma_1 sigma_2 = i sigma_3 cyclically
    assert np.allclose(PAULI[0] @ PAULI[1], 1j * PAULI[2])
    assert np.allclose(PAULI[1] @ PAULI[2], 1j * PAULI[0])
    assert np.allclose(PAULI[2] @ PAULI[0], 1j * PAULI[1])


def test_fiber_parameters_validation():
    with pytest.raises(ValueError):
        FiberParameters(eta=0.0, gamma=1.0, omega0=1.0)
    with pytest.raises(ValueError):
        FiberParameters(eta=1.0, gamma=-1.0, omega0=1.0)
    with pytest.raises(ValueError):
        FiberParameters(eta=1.0, gamma=1.0, omega0=0.0)
    with pytest.raises(ValueError):
        FiberParameters(eta=1.0, gamma=1.0, omega0=1.0, sigma2=-0.1)


def test_decoherence_length():
    p = FiberParameters(eta=2.0, gamma=1.0, omega0=1.0)
    assert p.decoherence_length == pytest.approx(1.0, rel=1e-15)
    p = FiberParameters(eta=1.0, gamma=3.0, omega0=2.0)
    assert p.decoherence_length == pytest.approx(4.0 / 36.0, rel=1e-15)


def test_dimensionless_constructor():
    p = FiberParameters.dimensionless()
    assert p.gamma == 1.0 and p.omega0 == 1.0
    assert p.decoherence_length == pytest.approx(1.0, rel=1e-15)
    p = FiberParameters.dimensionless(omega0=3.0, l_c=0.25)
    assert p.decoherence_length == pytest.approx(0.25, rel=1e-14)


def test_dispersion_profile_values():
    # quadratic profile at gamma=2, sigma2=0.1, omega0=10, omega=12
    p = FiberParameters(eta=1.0, gamma=2.0, omega0=10.0, sigma2=0.1)
    prof = make_dispersion(p, mode="quadratic")
    assert float(prof(12.0)) == pytest.approx(26.4, rel=1e-15)
    lin = make_dispersion(p)
    assert float(lin(12.0)) == pytest.approx(24.0, rel=1e-15)
    assert lin.is_linear
    assert not prof.is_linear
    with pytest.raises(ValueError):
        make_dispersion(p, mode="cubic")
    with pytest.raises(ValueError):
        prof.require_linear("some closed form")


def test_dispersion_quadratic_with_zero_sigma2_counts_as_linear():
    p = FiberParameters(eta=1.0, gamma=2.0, omega0=10.0)
    prof = make_dispersion(p, mode="quadratic")
    assert prof.is_linear
    prof.require_linear("ok")


def test_grid_from_nodes_trapezoid_weights():
    nodes = np.array([0.0, 1.0, 3.0, 4.0])
    g = FrequencyGrid.from_nodes(nodes, omega0=2.0)
    assert np.allclose(g.weights, [0.5, 1.5, 1.5, 0.5])
    # total weight equals the span for the trapezoid rule
    assert g.weights.sum() == pytest.approx(4.0)
    assert g.n == 4


def test_grid_validation():
    with pytest.raises(ValueError):
        FrequencyGrid.from_nodes(np.array([0.0, 1.0]), omega0=1.0)
    with pytest.raises(ValueError):
        FrequencyGrid.from_nodes(np.array([0.0, 2.0, 1.0]), omega0=1.0)
    with pytest.raises(ValueError):
        FrequencyGrid(nodes=np.array([0.0, 1.0, 2.0]), weights=np.array([1.0, -1.0, 1.0]), omega0=1.0)


def test_make_grid_defaults_and_errors():
    env = PulseEnvelope.single(kappa=0.1, omega0=1.0)
    g = make_grid(env)
    assert g.n == 64
    assert g.nodes[0] == pytest.approx(1.0 - 0.6)
    assert g.nodes[-1] == pytest.approx(1.0 + 0.6)
    with pytest.raises(ValueError):
        make_grid(env, n_nodes=2)
    with pytest.raises(ValueError):
        make_grid(env, half_width=2.0)
    with pytest.warns(UserWarning):
        make_grid(env, n_nodes=8)


def test_sampled_envelope_normalized_on_grid():
    env = PulseEnvelope.single(kappa=0.05, omega0=1.0)
    g = make_grid(env, n_nodes=64)
    phi = env.sampled(g)
    norm = np.sum(g.weights * np.abs(phi) ** 2)
    assert abs(norm - 1.0) < 1e-12
    # untruncated norm converges to 1 as the grid refines past 64 nodes
    raw = env.amplitude(g.nodes)
    raw_norm = np.sum(g.weights * raw**2)
    assert abs(raw_norm - 1.0) < 1e-8
    g2 = make_grid(env, n_nodes=128)
    raw2 = env.amplitude(g2.nodes)
    assert abs(np.sum(g2.weights * raw2**2) - 1.0) < 1e-10


def test_sampled_pair_normalized_on_grid():
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    g = make_grid(env, n_nodes=48)
    phi = env.sampled_pair(g)
    norm = np.einsum("i,j,ij->", g.weights, g.weights, np.abs(phi) ** 2)
    assert abs(norm - 1.0) < 1e-12


def test_envelope_constructors_reject_bad_widths():
    with pytest.raises(ValueError):
        PulseEnvelope.single(kappa=0.0, omega0=1.0)
    with pytest.raises(ValueError):
        PulseEnvelope.double(alpha=0.0, beta=1.0, omega0=1.0)
    with pytest.raises(ValueError):
        PulseEnvelope.double(alpha=1.0, beta=-2.0, omega0=1.0)


def test_envelope_variant_guards():
    single = PulseEnvelope.single(kappa=0.1, omega0=1.0)
    double = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    with pytest.raises(ValueError):
        single.amplitude_pair(1.0, 1.0)
    with pytest.raises(ValueError):
        double.amplitude(1.0)
    assert single.is_single and not single.is_double
    assert double.is_double and not double.is_single


def test_double_envelope_exact_norm():
    # integral of |phi|^2 over the plane is 1 for the double Gaussian
    env = PulseEnvelope.double(alpha=3.0, beta=2.0, omega0=1.0)
    x = np.linspace(-2.5, 2.5, 801) + 1.0
    phi = env.amplitude_pair(x[:, None], x[None, :])
    dx = x[1] - x[0]
    assert abs(np.sum(np.abs(phi) ** 2) * dx * dx - 1.0) < 1e-8


def test_double_envelope_width_is_marginal_std():
    env = PulseEnvelope.double(alpha=3.0, beta=2.0, omega0=1.0)
    x = np.linspace(-3.0, 3.0, 1201)
    phi = env.amplitude_pair(1.0 + x[:, None], 1.0 + x[None, :])
    marg = np.sum(np.abs(phi) ** 2, axis=1)
    marg /= np.sum(marg) * (x[1] - x[0])
    var = np.sum(x**2 * marg) * (x[1] - x[0])
    assert math.sqrt(var) == pytest.approx(env.width, rel=1e-6)


def test_bell_amplitudes():
    r = 1.0 / math.sqrt(2.0)
    c = BellLabel.SINGLET.amplitudes()
    assert c[0, 1] == r and c[1, 0] == -r and c[0, 0] == 0 and c[1, 1] == 0
    c = BellLabel.TRIPLET0.amplitudes()
    assert c[0, 1] == r and c[1, 0] == r
    c = BellLabel.TRIPLET_PLUS.amplitudes()
    assert c[0, 0] == r and c[1, 1] == r
    c = BellLabel.TRIPLET_MINUS.amplitudes()
    assert c[0, 0] == r and c[1, 1] == -r
    for label in BellLabel:
        assert np.sum(np.abs(label.amplitudes()) ** 2) == pytest.approx(1.0)


def test_input_single_state():
    env = PulseEnvelope.single(kappa=0.05, omega0=1.0)
    g = make_grid(env, n_nodes=32)
    rho = input_single_state(env, g)
    rho.validate()
    assert rho.quad_trace() == pytest.approx(1.0, abs=1e-12)
    # fully |1>-polarized: the |0> block is zero
    assert np.max(np.abs(rho.kernel[1, 1])) == 0.0
    assert np.max(np.abs(rho.kernel[0, 1])) == 0.0
    double = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    with pytest.raises(ValueError):
        input_single_state(double, g)


def test_input_two_state():
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    with pytest.warns(UserWarning):
        g = make_grid(env, n_nodes=12)
    rho = input_two_state(env, BellLabel.SINGLET, g)
    rho.validate()
    assert rho.quad_trace() == pytest.approx(1.0, abs=1e-10)
    single = PulseEnvelope.single(kappa=0.05, omega0=1.0)
    with pytest.raises(ValueError):
        input_two_state(single, BellLabel.SINGLET, g)


def test_single_density_validate_rejects_bad_kernels():
    env = PulseEnvelope.single(kappa=0.05, omega0=1.0)
    g = make_grid(env, n_nodes=32)
    rho = input_single_state(env, g)
    broken = rho.kernel.copy()
    broken[0, 1, 0, 0] = 1.0  # hermiticity violation
    from pmdsim import SinglePhotonDensity

    with pytest.raises(ValueError, match="Hermitian"):
        SinglePhotonDensity(kernel=broken, grid=g).validate()
    with pytest.raises(ValueError, match="trace"):
        SinglePhotonDensity(kernel=2.0 * rho.kernel, grid=g).validate()


def test_weighted_matrix_trace_matches_quadrature():
    env = PulseEnvelope.single(kappa=0.05, omega0=1.0)
    g = make_grid(env, n_nodes=32)
    rho = input_single_state(env, g)
    m = rho.as_weighted_matrix()
    assert np.trace(m).real == pytest.approx(rho.quad_trace(), abs=1e-13)
    # pure state: the weighted matrix is idempotent up to quadrature error
    assert np.max(np.abs(m @ m - m)) < 1e-10


def test_two_density_pair_form_has_no_trace():
    env = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=1.0)
    from pmdsim import evolve_separate_bell_pairs

    rho = evolve_separate_bell_pairs(env, BellLabel.SINGLET, FiberParameters.dimensionless(), 0.1, np.array([[1.0, 1.0], [1.1, 0.9]]))
    with pytest.raises(ValueError):
        rho.quad_trace()
    with pytest.raises(ValueError):
        rho.as_weighted_matrix()

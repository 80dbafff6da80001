"""Grid invariants, collocated operators, and reduced-generator oracles."""

import numpy as np
import pytest

from phnet import (MatrixFunction, Network, PHStructuralError, PHSubsystem,
                   assemble_generator, discretize_subsystem, dump_generator,
                   make_grid, spectrum)
from phnet.discretize import boundary_flux, discrete_energy_rate
from phnet.scenarios import _wave_subsystem

from helpers import chain_transfer_characteristic, secant_root

P1_WAVE = np.array([[0.0, 1.0], [1.0, 0.0]])


class TestGrid:
    @pytest.mark.parametrize("n", [8, 16, 32, 64])
    def test_diff_exact_on_monomials(self, n):
        grid = make_grid(n)
        for p in range(6):
            want = p * grid.points ** (p - 1) if p > 0 else np.zeros(n)
            assert np.abs(grid.diff @ grid.points ** p - want).max() <= 1e-10

    def test_weights_sum_to_one(self):
        for n in (8, 24, 48):
            assert abs(make_grid(n).quad.sum() - 1.0) <= 1e-14

    def test_quadrature_exactness_high_degree(self):
        # Gauss-Lobatto with n points integrates degree 2n-3 exactly
        n = 10
        grid = make_grid(n)
        for deg in (2 * n - 3, 2 * n - 4):
            exact = 1.0 / (deg + 1)
            assert abs(grid.quad @ grid.points ** deg - exact) <= 1e-14

    def test_summation_by_parts_identity(self):
        for n in (8, 32, 64):
            grid = make_grid(n)
            w, d = np.diag(grid.quad), grid.diff
            boundary = np.zeros((n, n))
            boundary[0, 0], boundary[-1, -1] = -1.0, 1.0
            assert np.abs(w @ d + d.T @ w - boundary).max() <= 1e-11


class TestDiscretizeSubsystem:
    def test_scalar_transport_is_diffmat(self):
        s = PHSubsystem(order=1, dim=1, p_matrices=(None, np.eye(1)),
                        hamiltonian=MatrixFunction.constant(np.eye(1)),
                        w_b=np.array([[1.0, 0.0]]), w_c=np.array([[0.0, 1.0]]))
        ops = discretize_subsystem(s, 16)
        assert np.allclose(ops.l, make_grid(16).diff)

    def test_mass_scales_with_hamiltonian(self):
        s1 = _wave_subsystem(1.0, 1.0, kind="last")
        s2 = PHSubsystem(order=1, dim=2, p_matrices=(None, P1_WAVE),
                         hamiltonian=MatrixFunction.constant(2.0 * np.eye(2)),
                         w_b=s1.w_b, w_c=s1.w_c)
        m1 = discretize_subsystem(s1, 12).m
        m2 = discretize_subsystem(s2, 12).m
        assert np.allclose(m2, 2.0 * m1)

    def test_energy_of_sine_state(self):
        s = _wave_subsystem(1.0, 1.0, kind="last")
        ops = discretize_subsystem(s, 32)
        x = np.zeros((32, 2))
        x[:, 0] = np.sin(np.pi * ops.grid.points)
        xv = x.reshape(-1)
        energy = float(xv @ ops.m @ xv)
        assert abs(energy - 0.5) <= 1e-8

    def test_n_too_small(self):
        s = _wave_subsystem(1.0, 1.0, kind="last")
        with pytest.raises(PHStructuralError):
            discretize_subsystem(s, 6)


def free_free_wave_network():
    s = _wave_subsystem(1.0, 1.0, kind="last")
    return Network(subsystems=(s,), k_mat=np.zeros((2, 2)))


def damped_wave_network(kappa=0.5):
    return Network(subsystems=(_wave_subsystem(1.0, 1.0, kind="last"),),
                   k_mat=np.array([[-kappa, 0.0], [0.0, 0.0]]))


class TestAssembleGenerator:
    def test_free_free_spectrum(self):
        gen = assemble_generator(free_free_wave_network(), 48)
        rep = spectrum(gen)
        assert abs(rep.abscissa) <= 1e-8
        assert len(rep.zero_modes) >= 1
        for k in range(1, 6):
            assert np.min(np.abs(rep.eigenvalues - 1j * np.pi * k)) <= 1e-8

    def test_damped_wave_matches_characteristic_equation(self):
        gen = assemble_generator(damped_wave_network(0.5), 64)
        rep = spectrum(gen)
        target = 0.5 * np.log(1.0 / 3.0)
        assert abs(rep.abscissa - target) <= 1e-6
        for k in range(5):
            lam = target + 1j * np.pi * k
            assert np.min(np.abs(rep.eigenvalues - lam)) <= 1e-6

    def test_spectral_convergence_of_abscissa(self):
        target = 0.5 * np.log(1.0 / 3.0)
        a64 = spectrum(assemble_generator(damped_wave_network(0.5), 64)).abscissa
        a128 = spectrum(assemble_generator(damped_wave_network(0.5), 128)).abscissa
        assert abs(a64 - target) <= 1e-6
        assert abs(a128 - a64) <= 1e-8

    def test_two_segment_chain_against_transfer_matrix(self):
        from phnet import build_chain
        net = build_chain(m=2, kappa=[0.5, 0.0])
        gen = assemble_generator(net, 48)
        rep = spectrum(gen)
        assert rep.abscissa < 0
        # transfer-matrix oracle: identical unit strings, conservative joint
        char = chain_transfer_characteristic([1.0, 1.0], [1.0, 1.0],
                                             [1.0, 1.0], [0.5, 0.0])
        # closed form for matched impedances: e^{4 lam} = (1-k)/(1+k)
        base = 0.25 * np.log((1 - 0.5) / (1 + 0.5))
        for k in range(4):
            guess = base + 0.5j * np.pi * k
            root = secant_root(char, guess, guess * (1 + 1e-4) + 1e-4)
            assert abs(char(root)) <= 1e-10
            assert np.min(np.abs(rep.eigenvalues - root)) <= 1e-7

    def test_complex_field_schroedinger_type_oracle(self):
        # x_t = i (Hx)'' with a dissipative left end y'(0) = -i k y(0) and a
        # Neumann right end; eigenvalues solve gamma tanh gamma = i k with
        # lambda = i gamma^2
        k = 0.8
        w_b = np.array([[0, 0, 1j * k, 1.0], [0, 1.0, 0, 0]])
        w_c = np.array([[0, 0, 1.0, 0], [1.0, 0, 0, 0]])
        s = PHSubsystem(order=2, dim=1,
                        p_matrices=(None, np.zeros((1, 1)), np.array([[1j]])),
                        hamiltonian=MatrixFunction.constant(np.eye(1)),
                        w_b=w_b, w_c=w_c)
        net = Network(subsystems=(s,), k_mat=np.zeros((2, 2)))
        from phnet import certify_network_dissipative
        assert certify_network_dissipative(net).passed
        rep = spectrum(assemble_generator(net, 64))

        def char(g):
            return g * np.tanh(g) - 1j * k

        for mode in (1, 2, 3):
            guess = 1j * mode * np.pi + k / (mode * np.pi)
            root = secant_root(char, guess, guess * 1.001)
            lam = 1j * root ** 2
            assert abs(char(root)) <= 1e-12
            assert np.min(np.abs(rep.eigenvalues - lam)) <= 1e-8

    def test_null_space_exactness(self):
        gen = assemble_generator(damped_wave_network(), 48)
        g = gen.meta["constraint"]
        assert np.abs(g @ gen.lift).max() <= 1e-10 * max(1.0, np.abs(g).max())

    def test_sym_drift_recorded_and_small(self):
        gen = assemble_generator(damped_wave_network(), 48)
        assert gen.meta["sym_drift"] <= 1e-9

    def test_rank_deficient_constraints_reported(self):
        s = _wave_subsystem(1.0, 1.0, kind="last")
        dup = np.vstack([s.w_b[0], s.w_b[0]])   # two identical rows
        bad = PHSubsystem(order=1, dim=2, p_matrices=s.p_matrices,
                          hamiltonian=s.hamiltonian, w_b=dup, w_c=s.w_c)
        net = Network(subsystems=(bad,), k_mat=np.zeros((2, 2)))
        with pytest.raises(PHStructuralError, match="subsystem 0"):
            assemble_generator(net, 24, with_companion=False)

    def test_dump_matrix_market(self, tmp_path):
        gen = assemble_generator(damped_wave_network(), 24, with_companion=False)
        dump_generator(gen, tmp_path / "gen")
        assert (tmp_path / "gen_a.mtx").exists()
        assert (tmp_path / "gen_m.mtx").exists()


class TestDiscreteEnergyBalance:
    def test_balance_exact_on_constraint_space(self):
        # Re<Lx, x>_M equals the boundary flux for constrained states: the
        # summation-by-parts identity, exact to rounding.
        rng = np.random.default_rng(3)
        net = damped_wave_network(0.7)
        gen = assemble_generator(net, 32, with_companion=False)
        for _ in range(10):
            v = rng.standard_normal(gen.n_red)
            lhs = discrete_energy_rate(gen, v)
            rhs = boundary_flux(gen, net, v)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_continuous_balance_defect_decreases_under_refinement(self):
        # against the *continuous* P_0 integral, evaluated on a fixed smooth
        # state, the balance defect is quadrature/interpolation error and
        # must drop (to a rounding floor) as n doubles
        p0 = MatrixFunction.polynomial(np.array(
            [np.diag([-1.0, -0.7]), np.diag([-0.5, 0.1])]))
        s = PHSubsystem(order=1, dim=2, p_matrices=(p0, P1_WAVE),
                        hamiltonian=MatrixFunction.constant(np.eye(2)),
                        w_b=np.array([[0, 0, 0, -1.0], [0, 1.0, 0, 0]]),
                        w_c=np.array([[0, 0, 1.0, 0], [1.0, 0, 0, 0]]))
        net = Network(subsystems=(s,), k_mat=np.zeros((2, 2)))
        gx, gw = np.polynomial.legendre.leggauss(400)
        gx, gw = 0.5 * (gx + 1), 0.5 * gw

        def smooth_state(z):
            return np.stack([np.exp(np.sin(3.0 * z)), np.cos(2.0 * z)], axis=1)

        def defect(n):
            gen = assemble_generator(net, n, with_companion=False)
            grid = gen.grids[0]
            x = smooth_state(grid.points).reshape(-1)
            lhs = float(np.real(x @ gen.meta["m_full"] @ gen.meta["l_full"] @ x))
            # interpolate the grid polynomial to the fine Gauss rule
            vals = np.empty((len(gx), 2))
            xs = x.reshape(-1, 2)
            for c in range(2):
                vals[:, c] = _interp_poly(grid.points, xs[:, c], gx)
            p0_vals = p0(gx)
            p0_int = float(gw @ np.einsum("qi,qij,qj->q", vals, p0_vals, vals))
            tau = gen.trace_mats[0] @ x
            from phnet import flux_form
            q = flux_form(s).q
            flux = 0.5 * float(np.real(tau @ q @ tau)) + p0_int
            return abs(lhs - flux) / max(1.0, abs(lhs))

        d8, d16, d32 = defect(8), defect(16), defect(32)
        floor = 1e-12
        assert d16 <= 0.5 * d8 + floor
        assert d32 <= 0.5 * d16 + floor


def _interp_poly(nodes, values, targets):
    """Barycentric interpolation of the collocation polynomial."""
    dx = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(dx, 1.0)
    w = 1.0 / np.prod(dx, axis=1)
    num = np.zeros(len(targets))
    den = np.zeros(len(targets))
    exact = np.full(len(targets), np.nan)
    for i, (xi, wi) in enumerate(zip(nodes, w)):
        diff = targets - xi
        hit = np.abs(diff) < 1e-14
        exact[hit] = values[i]
        diff[hit] = 1.0
        num += wi * values[i] / diff
        den += wi / diff
    out = num / den
    out[~np.isnan(exact)] = exact[~np.isnan(exact)]
    return out



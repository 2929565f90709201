"""Fluxes, state conversions, boundary handling, mapping, and initial data."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specshock.physics import (
    GAMMA,
    CylinderMapping,
    EulerState,
    MappedGeometry,
    StateError,
    advection_composite_profile,
    advection_wshape_profile,
    apply_reflective_bc,
    conserved_from_primitive,
    curvilinear_rhs,
    euler_flux_1d,
    euler_flux_2d,
    init_problem,
    isentropic_vortex_primitive,
    normal_shock_downstream,
    primitive_from_conserved,
    problem,
    scalar_flux,
    scalar_wave_speed,
)
from specshock.spectral import Grid

positive = st.floats(0.05, 20.0)
speeds = st.floats(-5.0, 5.0)


class TestScalarFlux:
    def test_advection_is_identity(self):
        u = np.linspace(-2, 2, 11)
        assert np.array_equal(scalar_flux(u, "advection"), u)

    def test_burgers_value(self):
        assert scalar_flux(2.0, "burgers") == pytest.approx(2.0)

    def test_nonconvex_roots_and_origin(self):
        for root in (-2.0, -1.0, 1.0, 2.0):
            assert scalar_flux(root, "nonconvex") == pytest.approx(0.0)
        assert scalar_flux(0.0, "nonconvex") == pytest.approx(1.0)

    @given(st.floats(-3.0, 3.0))
    @settings(max_examples=60)
    def test_burgers_wave_speed_is_derivative(self, u):
        h = 1e-6
        fd = (scalar_flux(u + h, "burgers") - scalar_flux(u - h, "burgers")) / (2 * h)
        assert scalar_wave_speed(u, "burgers") == pytest.approx(abs(fd), abs=1e-6)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            scalar_flux(1.0, "cubic")


class TestEulerFlux:
    def test_stationary_gas_1d(self):
        state = conserved_from_primitive(np.array([1.0]), (np.array([0.0]),), np.array([1.0]))
        assert np.allclose(euler_flux_1d(state).ravel(), [0.0, 1.0, 0.0])

    def test_sod_left_state(self):
        state = conserved_from_primitive(np.array([1.0]), (np.array([0.0]),), np.array([1.0]))
        assert np.allclose(euler_flux_1d(state).ravel(), [0.0, 1.0, 0.0], atol=1e-15)

    @given(positive, speeds, positive)
    @settings(max_examples=60)
    def test_matches_componentwise_formulas(self, rho, u, p):
        state = conserved_from_primitive(np.array([rho]), (np.array([u]),), np.array([p]))
        flux = euler_flux_1d(state).ravel()
        energy = p / (GAMMA - 1.0) + 0.5 * rho * u * u
        expected = np.array([rho * u, rho * u * u + p, u * (energy + p)])
        assert np.allclose(flux, expected, rtol=1e-14, atol=1e-14)

    def test_2d_stationary_gas(self):
        z = np.zeros((2, 2))
        state = conserved_from_primitive(np.ones((2, 2)), (z, z), np.ones((2, 2)))
        fx = euler_flux_2d(state, 0)
        fy = euler_flux_2d(state, 1)
        assert np.allclose(fx[0], 0) and np.allclose(fx[1], 1.0) and np.allclose(fx[2], 0)
        assert np.allclose(fy[0], 0) and np.allclose(fy[1], 0) and np.allclose(fy[2], 1.0)

    def test_mach_11_upstream_state(self):
        u1 = 1.1 * math.sqrt(GAMMA)
        state = conserved_from_primitive(np.array([1.0]), (np.array([u1]), np.array([0.0])),
                                         np.array([1.0]))
        flux = euler_flux_2d(state, 0).ravel()
        energy = 1.0 / (GAMMA - 1.0) + 0.5 * u1 * u1
        assert flux[0] == pytest.approx(u1, rel=1e-14)
        assert flux[1] == pytest.approx(1.1**2 * GAMMA + 1.0, rel=1e-14)
        assert flux[2] == pytest.approx(0.0, abs=1e-15)
        assert flux[3] == pytest.approx(u1 * (energy + 1.0), rel=1e-14)

    @given(positive, speeds, speeds, positive)
    @settings(max_examples=40)
    def test_axis_swap_symmetry(self, rho, u, v, p):
        state = conserved_from_primitive(np.array([rho]), (np.array([u]), np.array([v])),
                                         np.array([p]))
        swapped = conserved_from_primitive(np.array([rho]), (np.array([v]), np.array([u])),
                                           np.array([p]))
        fx = euler_flux_2d(state, 0)
        gy = euler_flux_2d(swapped, 1)
        assert np.allclose(fx[[0, 1, 2, 3]].ravel(), gy[[0, 2, 1, 3]].ravel(), rtol=1e-14)


class TestConversions:
    def test_unit_state_energy(self):
        state = conserved_from_primitive(np.array([1.0]), (np.array([0.0]),), np.array([1.0]))
        assert state.energy[0] == pytest.approx(2.5)

    def test_lax_left_state_energy(self):
        state = conserved_from_primitive(np.array([0.445]), (np.array([0.698]),),
                                         np.array([3.528]))
        expected = 3.528 / 0.4 + 0.5 * 0.445 * 0.698**2
        assert state.energy[0] == pytest.approx(expected, rel=1e-14)

    @given(positive, speeds, positive)
    @settings(max_examples=100)
    def test_round_trip(self, rho, u, p):
        state = conserved_from_primitive(np.array([rho]), (np.array([u]),), np.array([p]))
        rho2, (u2,), p2 = primitive_from_conserved(state)
        assert rho2[0] == pytest.approx(rho, rel=1e-13)
        assert u2[0] == pytest.approx(u, rel=1e-13, abs=1e-13)
        assert p2[0] == pytest.approx(p, rel=1e-13)

    def test_rejects_nonpositive(self):
        with pytest.raises(StateError):
            conserved_from_primitive(np.array([-1.0]), (np.array([0.0]),), np.array([1.0]))
        with pytest.raises(StateError):
            conserved_from_primitive(np.array([1.0]), (np.array([0.0]),), np.array([0.0]))

    def test_validate_catches_hollow_state(self):
        fields = np.array([[1.0], [3.0], [1.0]])  # kinetic energy above total
        with pytest.raises(StateError):
            EulerState(fields).validate()


class TestShockRelations:
    def test_mach3_into_unit_state(self):
        rho2, u2, p2 = normal_shock_downstream(1.0, 0.0, 1.0, 3.0)
        assert rho2 == pytest.approx(27.0 / 7.0, rel=1e-12)
        assert p2 == pytest.approx(31.0 / 3.0, rel=1e-12)
        assert u2 == pytest.approx((20.0 / 9.0) * math.sqrt(1.4), rel=1e-12)

    def test_stationary_mach_11(self):
        u1 = 1.1 * math.sqrt(GAMMA)
        rho2, u2, p2 = normal_shock_downstream(1.0, u1, 1.0, 1.1, speed=0.0)
        # mass flux continuity for a standing shock
        assert rho2 * u2 == pytest.approx(u1, rel=1e-12)
        assert p2 == pytest.approx(1.245, rel=1e-12)


class TestInitialData:
    def test_example3_riemann_levels(self):
        spec = problem(3)
        u = init_problem(spec)[0]
        x = spec.grid.coordinates(0)
        assert np.all(u[x <= 0.0] == 1.0)
        assert np.all(u[x > 0.0] == 0.0)

    def test_example7_preshock_density(self):
        spec = problem(7)
        fields = init_problem(spec)
        x = spec.grid.coordinates(0)
        k = spec.constants["kappa"]
        pre = x > 0.5
        assert np.allclose(fields[0][pre], np.exp(-0.01 * np.sin(k * x[pre])), rtol=1e-14)
        # at the wave crest (kx = pi/2 modulo a period) the density is e^-0.01
        crest = (np.pi / 2 + 2 * np.pi) / k
        assert crest > 0.5
        assert np.exp(-0.01 * np.sin(k * crest)) == pytest.approx(np.exp(-0.01), rel=1e-15)
        idx = np.argmin(np.abs(x - crest))
        assert fields[0][idx] == pytest.approx(np.exp(-0.01), abs=2e-5)

    def test_example11_center_density(self):
        # mpmath oracle: [1 - 0.4*25*e^2/(16*1.4*pi^2)]^2.5
        spec = problem(11, n=64)
        rho, _u, _v, _p = isentropic_vortex_primitive(5.0, 5.0, (5.0, 5.0), 5.0, 1.0)
        assert rho == pytest.approx(0.36167281101506877, abs=1e-14)
        fields = init_problem(spec)
        x, y = spec.grid.mesh()
        i = np.argmin(np.abs(x[:, 0] - 5.0))
        j = np.argmin(np.abs(y[0] - 5.0))
        assert fields[0][i, j] == pytest.approx(0.36167281101506877, rel=1e-10)

    def test_example1_profile_pieces(self):
        x = np.array([-0.7, -0.3, 0.1, 0.5, 0.9])
        u = advection_composite_profile(x)
        beta = math.log(2.0) / (36.0 * 0.005**2)
        gauss = (np.exp(-beta * 0.005**2) * 2 + 4.0) / 6.0
        assert u[0] == pytest.approx(gauss, rel=1e-13)
        assert u[1] == 1.0
        assert u[2] == pytest.approx(1.0)
        assert u[3] == pytest.approx((2.0 * math.sqrt(1 - (10 * 0.005) ** 2) + 4.0) / 6.0,
                                     rel=1e-13)
        assert u[4] == 0.0

    def test_example2_w_profile(self):
        x = np.array([-0.5, 0.1, 0.3, 0.5, 0.7, 0.9])
        assert np.allclose(advection_wshape_profile(x), [0.0, 1.0, 0.6, 0.6, 1.0, 0.0])

    def test_example9_periodic_in_y(self):
        spec = problem(9)
        fields = init_problem(spec)
        x, y = spec.grid.mesh()
        kappa, theta = spec.constants["kappa"], spec.constants["theta"]
        width = spec.grid.lengths[1]
        assert kappa * math.sin(theta) * width == pytest.approx(2.0 * math.pi, rel=1e-12)
        wrapped = np.exp(-0.1 * np.sin(kappa * (x[:, 0] * math.cos(theta)
                                                + (y[0, 0] + width) * math.sin(theta))))
        base = np.exp(-0.1 * np.sin(kappa * (x[:, 0] * math.cos(theta)
                                             + y[0, 0] * math.sin(theta))))
        assert np.allclose(wrapped, base, atol=1e-12)

    def test_example10_upstream_pressure_from_entropy(self):
        spec = problem(10)
        fields = init_problem(spec)
        from specshock.physics import pressure

        p = pressure(fields)
        rho = fields[0]
        upstream = spec.grid.mesh()[0] < 0.4
        # isentropic vortex: p = rho^gamma where the perturbation lives
        assert np.allclose(p[upstream], rho[upstream] ** GAMMA, rtol=1e-10)

    def test_unknown_example(self):
        with pytest.raises(ValueError):
            problem(13)

    def test_ratio_table_rows(self):
        assert problem(1).filter_ratio == 0.6
        assert problem(1, n=256).filter_ratio == 0.8
        assert problem(6, case="sod").filter_ratio == 1.1
        assert problem(6, case="lax").filter_ratio == 0.95
        assert problem(7, case="k39").grid.points == (2049,)
        assert problem(11, case="eta05").filter_ratio == 2.8


class TestReflectiveBc:
    def test_uniform_parallel_flow_ghosts_match_interior(self):
        ones = np.ones((4, 4))
        fields = conserved_from_primitive(ones, (ones, np.zeros((4, 4))), ones).fields
        out = apply_reflective_bc(fields, 1, "low", 2)
        assert np.allclose(out[:, :, :2], out[:, :, 2:4][:, :, ::-1])

    def test_normal_velocity_negated(self):
        ones = np.ones((4, 4))
        v = np.full((4, 4), 0.7)
        fields = conserved_from_primitive(ones, (np.zeros((4, 4)), v), ones).fields
        out = apply_reflective_bc(fields, 1, "low", 1)
        assert np.allclose(out[2][:, 0], -fields[2][:, 0])
        assert np.allclose(out[0][:, 0], fields[0][:, 0])

    def test_side_validation(self):
        with pytest.raises(ValueError):
            apply_reflective_bc(np.ones((4, 3, 3)), 0, "middle", 1)


class TestCylinderMapping:
    def test_surface_is_unit_circle(self):
        mapping = CylinderMapping()
        eta = np.linspace(0.0, 1.0, 11)
        x, y = mapping.physical_coords(1.0, eta)
        assert np.allclose(x**2 + y**2, 1.0, atol=1e-14)

    def test_jacobian_matches_symbolic_derivative(self):
        import sympy as sp

        xi_s, eta_s = sp.symbols("xi eta")
        mapping = CylinderMapping()
        phi = mapping.angle * (2 * eta_s - 1)
        x_expr = -(mapping.radius_x - (mapping.radius_x - 1) * xi_s) * sp.cos(phi)
        y_expr = (mapping.radius_y - (mapping.radius_y - 1) * xi_s) * sp.sin(phi)
        point = {xi_s: sp.Rational(0), eta_s: sp.Rational(1, 2)}
        expected = [float(sp.diff(e, v).subs(point))
                    for e in (x_expr, x_expr, y_expr, y_expr)
                    for v in ((xi_s,) if e is None else ())]
        x_xi, x_eta, y_xi, y_eta = mapping.jacobian_analytic(0.0, 0.5)
        assert x_xi == pytest.approx(float(sp.diff(x_expr, xi_s).subs(point)), abs=1e-12)
        assert x_eta == pytest.approx(float(sp.diff(x_expr, eta_s).subs(point)), abs=1e-12)
        assert y_xi == pytest.approx(float(sp.diff(y_expr, xi_s).subs(point)), abs=1e-12)
        assert y_eta == pytest.approx(float(sp.diff(y_expr, eta_s).subs(point)), abs=1e-12)

    def test_discrete_metrics_converge_to_analytic_in_the_interior(self):
        mapping = CylinderMapping()
        grid = Grid.box(64, 64, (0.0, 1.0), (0.0, 1.0), periodic=(False, False))
        geom = MappedGeometry.build(mapping, grid)
        xi, eta = grid.mesh()
        x_xi, _x_eta, _y_xi, y_eta = mapping.jacobian_analytic(xi, eta)
        inner = (slice(16, -16), slice(16, -16))
        assert np.max(np.abs(geom.x_xi[inner] - x_xi[inner])) < 5e-2
        assert np.max(np.abs(geom.y_eta[inner] - y_eta[inner])) < 5e-2


class TestCurvilinearRhs:
    def test_identity_mapping_reduces_to_cartesian(self):
        class IdentityMapping:
            def physical_coords(self, xi, eta):
                return np.asarray(xi) * 2.0, np.asarray(eta) * 3.0

        grid = Grid.box(32, 32, (0.0, 1.0), (0.0, 1.0), periodic=(False, False))
        geom = MappedGeometry.build(IdentityMapping(), grid)
        rng = np.random.default_rng(0)
        rho = 1.0 + 0.05 * rng.standard_normal(grid.points)
        fields = conserved_from_primitive(rho, (np.zeros_like(rho), np.zeros_like(rho)),
                                          np.ones_like(rho)).fields
        out = curvilinear_rhs(fields, geom, wall=False)
        # Cartesian reference on the stretched physical grid
        from specshock.physics import euler_flux_arrays
        from specshock.spectral import mirror_derivative_axis

        phys = Grid.box(32, 32, (0.0, 2.0), (0.0, 3.0), periodic=(False, False))
        expected = -(mirror_derivative_axis(euler_flux_arrays(fields, GAMMA, 0), phys, 0)
                     + mirror_derivative_axis(euler_flux_arrays(fields, GAMMA, 1), phys, 1))
        assert np.max(np.abs(out - expected)) < 1e-11

    def test_free_stream_preserved(self):
        spec = problem(12)
        geom = MappedGeometry.build(spec.mapping, spec.grid)
        ones = np.ones(spec.grid.points)
        fields = conserved_from_primitive(1.4 * ones, (ones, 0.0 * ones), ones).fields
        residual = np.max(np.abs(curvilinear_rhs(fields, geom, wall=False)))
        assert residual <= 1e-8

    def test_singular_mapping_detected(self):
        class Collapsed:
            def physical_coords(self, xi, eta):
                return np.asarray(xi) * 0.0, np.asarray(eta) * 1.0

        grid = Grid.box(16, 16, (0.0, 1.0), (0.0, 1.0), periodic=(False, False))
        with pytest.raises(ValueError):
            MappedGeometry.build(Collapsed(), grid)

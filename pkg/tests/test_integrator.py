import numpy as np
import pytest

from qdfsim.analysis import fidelity_series, rotation_frequencies
from qdfsim.integrator import Trajectory, evolve_expm, evolve_rk4
from qdfsim.liouvillian import (
    SECTORS_REDUCED,
    Generator,
    assemble,
    reduce_spin_symmetric,
)
from qdfsim.model import ModelParams
from qdfsim.states import make_bell, to_density

from conftest import eig_propagate


def bell_setup(zeta=0.2):
    p = ModelParams.uniform(2, zeta=zeta)
    g = reduce_spin_symmetric(assemble(p))
    amps = make_bell("d")
    v0 = to_density(amps).flatten(SECTORS_REDUCED)
    return p, g, amps, v0


class TestSampling:
    def test_zero_horizon_returns_initial(self):
        _, g, _, v0 = bell_setup()
        traj = evolve_rk4(g, v0, 0.0, 1e-3)
        assert traj.times.tolist() == [0.0]
        assert np.array_equal(traj.states[0], v0)

    def test_sample_times(self):
        _, g, _, v0 = bell_setup()
        traj = evolve_rk4(g, v0, 1.0, 1e-3, sample_interval=0.25)
        assert np.allclose(traj.times, [0.0, 0.25, 0.5, 0.75, 1.0], atol=1e-12)
        assert traj.states.shape == (5, 48)

    def test_grid_validation(self):
        _, g, _, v0 = bell_setup()
        with pytest.raises(ValueError):
            evolve_rk4(g, v0, 1.0, dt=0.0)
        with pytest.raises(ValueError):
            evolve_rk4(g, v0, 1.0, dt=-1e-3)
        with pytest.raises(ValueError):
            evolve_rk4(g, v0, -1.0, dt=1e-3)
        with pytest.raises(ValueError):
            evolve_rk4(g, v0, 1.0, dt=0.1, sample_interval=0.25)
        with pytest.raises(ValueError):
            evolve_rk4(g, v0, 1.0, dt=1e-3, sample_interval=0.3)

    def test_dimension_mismatch(self):
        _, g, _, v0 = bell_setup()
        with pytest.raises(ValueError):
            evolve_rk4(g, v0[:-1], 1.0, 1e-3)


class TestAgainstClosedForm:
    def test_population_chain_matches_eigen_oracle(self):
        # omega = 0 decouples configurations; the z=0 cell is the plain
        # 4-state occupation chain a -> b_up/b_dn -> c and back
        p = ModelParams.uniform(2, omega=0.0, zeta=0.2)
        g = assemble(p)
        rho_a = np.zeros((4, 4), complex)
        rho_a[0, 0] = 1.0
        zero = np.zeros((4, 4), complex)
        from qdfsim.liouvillian import SectorDM

        v0 = SectorDM(rho_a, zero, zero.copy(), zero.copy()).flatten()
        t = 2.5
        traj = evolve_rk4(g, v0, t, 1e-3, sample_interval=t)
        final = traj.final().reshape(4, 4, 4)

        gl = gr = 0.8  # both qubits down, zeta = 0.2
        chain = np.array(
            [
                [-2 * gl, gr, gr, 0.0],
                [gl, -(gl + gr), 0.0, gr],
                [gl, 0.0, -(gl + gr), gr],
                [0.0, gl, gl, -2 * gr],
            ]
        )
        expected = eig_propagate(chain, np.array([1.0, 0.0, 0.0, 0.0]), t)
        got = np.array([final[s][0, 0] for s in range(4)])
        assert np.abs(got - expected).max() < 1e-9
        # nothing leaks into other configuration cells
        mask = np.ones((4, 4), bool)
        mask[0, 0] = False
        assert np.abs(final[:, mask]).max() < 1e-12

    def test_self_convergence_halving_dt(self):
        p, g, amps, v0 = bell_setup()
        rho0 = np.outer(amps, amps.conj())
        om = rotation_frequencies(p)
        fids = []
        for dt in (1e-3, 5e-4):
            traj = evolve_rk4(g, v0, 50.0, dt, sample_interval=50.0)
            fids.append(
                fidelity_series(traj.times, traj.states, rho0, om, 2, 3)[-1]
            )
        assert abs(fids[0] - fids[1]) < 1e-9


class TestInternalRoutes:
    def test_propagator_equals_stepwise(self):
        _, g, _, v0 = bell_setup()
        a = evolve_rk4(g, v0, 2.0, 1e-3, 0.5, stepwise=True)
        b = evolve_rk4(g, v0, 2.0, 1e-3, 0.5, stepwise=False)
        assert np.abs(a.states - b.states).max() < 1e-10

    def test_batch_matches_single_columns(self):
        _, g, _, v0 = bell_setup()
        w0 = to_density(make_bell("b")).flatten(SECTORS_REDUCED)
        batch = evolve_rk4(g, np.stack([v0, w0], axis=1), 5.0, 1e-3, 1.0)
        single_v = evolve_rk4(g, v0, 5.0, 1e-3, 1.0)
        single_w = evolve_rk4(g, w0, 5.0, 1e-3, 1.0)
        assert np.abs(batch.states[:, :, 0] - single_v.states).max() < 1e-12
        assert np.abs(batch.states[:, :, 1] - single_w.states).max() < 1e-12

    @pytest.mark.filterwarnings("ignore:invalid value encountered")
    @pytest.mark.filterwarnings("ignore:overflow encountered")
    def test_non_finite_detection_reports_step(self):
        # a growing mode overflows quickly at this step size
        rows = np.array([0, 0, 1, 1], dtype=np.int64)
        cols = np.array([0, 1, 0, 1], dtype=np.int64)
        vals = np.array([1e4, -1e4, -1e4, 1e4], dtype=complex)
        g = Generator(1, ("a", "b", "c"), rows, cols, vals)
        v0 = np.zeros(g.dim, complex)
        v0[0] = 1.0
        with pytest.raises(FloatingPointError, match="step"):
            evolve_rk4(g, v0, 1.0, 1e-3, sample_interval=0.1, stepwise=True)


class TestExpmOracle:
    def test_t_zero_identity(self):
        _, g, _, v0 = bell_setup()
        assert np.array_equal(evolve_expm(g, v0, 0.0), v0)

    def test_semigroup_property(self):
        _, g, _, v0 = bell_setup()
        once = evolve_expm(g, v0, 7.0)
        comp = evolve_expm(g, evolve_expm(g, v0, 3.0), 4.0)
        assert np.abs(once - comp).max() < 1e-10

    def test_rk4_matches_expm_two_qubits(self):
        _, g, _, v0 = bell_setup()
        rk4 = evolve_rk4(g, v0, 50.0, 1e-3, sample_interval=50.0).final()
        ref = evolve_expm(g, v0, 50.0)
        assert np.abs(rk4 - ref).max() < 1e-8

    def test_dimension_guard(self):
        empty = np.array([], dtype=np.int64)
        g = Generator(6, ("a", "b_up", "b_dn", "c"), empty, empty, np.array([], complex))
        assert g.dim == 16384
        with pytest.raises(ValueError):
            evolve_expm(g, np.zeros(g.dim, complex), 1.0)


class TestConservationAlongTrajectory:
    def test_trace_and_positivity(self):
        _, g, amps, v0 = bell_setup(zeta=0.6)
        traj = evolve_rk4(g, v0, 50.0, 1e-3, 0.5)
        mats = traj.states.reshape(-1, 3, 4, 4)
        pops = np.einsum("tsii->ts", mats).real
        total = pops.sum(axis=1)
        assert np.abs(total - 1.0).max() < 1e-9
        assert pops.min() > -1e-9
        assert pops.max() < 1 + 1e-9
        diag = np.einsum("tsii->tsi", mats)
        assert diag.real.min() > -1e-9
        assert np.abs(diag.imag).max() < 1e-9

    def test_trajectory_final_accessor(self):
        _, g, _, v0 = bell_setup()
        traj = evolve_rk4(g, v0, 1.0, 1e-3, 0.5)
        assert np.array_equal(traj.final(), traj.states[-1])
        assert isinstance(traj, Trajectory)

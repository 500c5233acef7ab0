"""Doubled-register driver: vec(rho) dynamics checked against dense evolution."""

import numpy as np
import pytest

from conftest import (
    assert_close,
    dense_expm,
    lindblad_superop,
    random_unit,
    sum_matrix,
    unvec_col,
    vec_col,
)
from oqite.errors import DegenerateTraceError
from oqite.models import tls_model, vectorize
from oqite.oracle import evolve_exact
from oqite.pauli import PauliSum
from oqite.qite import PauliBasis
from oqite.states import DensityMatrix, ShotModel, StateVector
from oqite.vectorized import (
    Algo1Config,
    VectorizedState,
    conserved_norm,
    hermiticity_drift,
    init_vectorized,
    observe,
    purity,
    run,
    step,
    trace_surrogate,
)

Z_OBS = PauliSum.from_label("Z")


def _full_cfg(tau, n_steps, **kw):
    return Algo1Config(tau=tau, n_steps=n_steps, basis=PauliBasis.full(2), **kw)


def _model_superop(model):
    return lindblad_superop(
        sum_matrix(model.hamiltonian), [sum_matrix(j) for j in model.jumps]
    )


# --- initialization ---------------------------------------------------------


def test_init_normalizes_and_keeps_purity(rng):
    psi = StateVector(1, random_unit(rng, 2))
    rho = DensityMatrix.pure(psi)
    state = init_vectorized(rho)
    assert state.n_phys == 1
    assert abs(state.v.norm() - 1.0) < 1e-12
    assert abs(state.purity0 - 1.0) < 1e-12
    # v is vec(rho) up to the stored scale
    assert_close(
        state.v.amplitudes * np.sqrt(state.purity0), vec_col(rho.entries), 1e-12
    )


def test_init_mixed_state():
    rho = DensityMatrix.from_weights([("0", 0.5), ("1", 0.5)], 1)
    state = init_vectorized(rho)
    assert abs(state.purity0 - 0.5) < 1e-12
    assert abs(trace_surrogate(state) - np.sqrt(2.0)) < 1e-12
    assert abs(purity(state) - 0.5) < 1e-12


def test_init_rejects_empty_state():
    with pytest.raises(ValueError):
        init_vectorized(DensityMatrix(1, np.zeros((2, 2))))


def test_trace_surrogate_pure_state(rng):
    state = init_vectorized(DensityMatrix.pure(StateVector(2, random_unit(rng, 4))))
    assert abs(trace_surrogate(state) - 1.0) < 1e-12


# --- stepping ---------------------------------------------------------------


def test_unitary_path_matches_dense():
    model = tls_model(1.0, 1.0, 0.0)
    rho0 = DensityMatrix.pure(StateVector.from_bits("1"))
    cfg = Algo1Config(
        tau=0.05, n_steps=20, basis=PauliBasis.full(2), trotter_substeps=64
    )
    gen = vectorize(model)
    state = init_vectorized(rho0)
    for _ in range(cfg.n_steps):
        result = step(state, gen, cfg)
        assert result.qite is None  # gamma = 0 never invokes the solver
        assert abs(result.raw_norm - 1.0) < 1e-12
        state = result.state
    want = evolve_exact(model, rho0, 1.0)
    got = unvec_col(state.v.amplitudes * np.sqrt(state.purity0))
    assert_close(got, want.entries, 5e-4, "unitary trotter")


def test_single_dissipative_step_tracks_generator(rng):
    model = tls_model(1.0, 1.0, 1.0)
    rho0 = DensityMatrix.pure(StateVector(1, random_unit(rng, 2)))
    tau = 1e-3
    state = init_vectorized(rho0)
    out = step(state, vectorize(model), _full_cfg(tau, 1))
    got = out.state.v.amplitudes
    want = dense_expm(tau * _model_superop(model)) @ vec_col(rho0.entries)
    want = want / np.linalg.norm(want)
    # align the irrelevant global phase before comparing directions
    phase = np.vdot(got, want)
    want = want * (abs(phase) / phase if phase != 0 else 1.0)
    assert np.linalg.norm(got - want) < 5e-5
    assert out.qite is not None
    assert abs(out.raw_norm - 1.0) < 1e-12


def test_trajectory_tracks_exact_evolution():
    model = tls_model(1.0, 1.0, 1.0)
    rho0 = DensityMatrix.pure(StateVector.from_bits("1"))
    gen = vectorize(model)
    cfg = _full_cfg(0.01, 50, delta_reg=1e-6)
    state = init_vectorized(rho0)
    for _ in range(cfg.n_steps):
        state = step(state, gen, cfg).state
    got = observe(state, Z_OBS)
    want = evolve_exact(model, rho0, 0.5)
    want_z = float(np.real(np.trace(sum_matrix(Z_OBS) @ want.entries)))
    assert abs(got - want_z) < 5e-3


def test_trotter_substeps_reduce_splitting_error():
    model = tls_model(1.0, 1.0, 0.0)
    rho0 = DensityMatrix.pure(StateVector.from_bits("1"))
    gen = vectorize(model)
    want = evolve_exact(model, rho0, 0.5)
    want_z = float(np.real(np.trace(sum_matrix(Z_OBS) @ want.entries)))

    def err(substeps):
        cfg = Algo1Config(
            tau=0.1, n_steps=5, basis=PauliBasis.full(2), trotter_substeps=substeps
        )
        state = init_vectorized(rho0)
        for _ in range(cfg.n_steps):
            state = step(state, gen, cfg).state
        return abs(observe(state, Z_OBS) - want_z)

    assert err(16) < err(1)


# --- readout ----------------------------------------------------------------


def _dense_readout(state, obs):
    rho = unvec_col(state.v.amplitudes)
    o = sum_matrix(obs)
    return float(np.real(np.trace(o @ rho) / np.trace(rho)))


def test_observe_matches_dense_ratio(rng):
    model = tls_model(0.7, 1.3, 0.8)
    state = init_vectorized(
        DensityMatrix.pure(StateVector(1, random_unit(rng, 2)))
    )
    gen = vectorize(model)
    cfg = _full_cfg(0.02, 1)
    for _ in range(10):
        state = step(state, gen, cfg).state
    obs = PauliSum.from_text("0.5*Z - 1.2*X + 0.3*I")
    assert abs(observe(state, obs) - _dense_readout(state, obs)) < 1e-10


def test_observe_register_guard(rng):
    state = init_vectorized(DensityMatrix.pure(StateVector(1, random_unit(rng, 2))))
    with pytest.raises(ValueError):
        observe(state, PauliSum.from_label("ZZ"))


def test_observe_traceless_state_raises():
    # vec(X)/sqrt(2) is unit norm but has zero overlap with vec(I)
    amps = vec_col(np.array([[0, 1], [1, 0]], dtype=np.complex128)) / np.sqrt(2.0)
    state = VectorizedState(1, StateVector(2, amps), 1.0)
    with pytest.raises(DegenerateTraceError):
        observe(state, Z_OBS)
    with pytest.raises(DegenerateTraceError):
        purity(state)


def test_observe_sampled_close_and_deterministic(rng):
    state = init_vectorized(DensityMatrix.pure(StateVector(1, random_unit(rng, 2))))
    exact = observe(state, Z_OBS)
    got1 = observe(state, Z_OBS, shot=ShotModel(1 << 15, seed=3))
    got2 = observe(state, Z_OBS, shot=ShotModel(1 << 15, seed=3))
    assert got1 == got2
    assert abs(got1 - exact) < 0.05


# --- diagnostics ------------------------------------------------------------


def test_diagnostics_along_a_dissipative_run():
    model = tls_model(1.0, 1.0, 1.0)
    rho0 = DensityMatrix.pure(StateVector.from_bits("1"))
    gen = vectorize(model)
    cfg = _full_cfg(0.005, 1, delta_reg=1e-6)
    state = init_vectorized(rho0)
    assert abs(purity(state) - 1.0) < 1e-12
    assert abs(conserved_norm(state) - 1.0) < 1e-12
    assert hermiticity_drift(state) < 1e-12
    for _ in range(100):
        state = step(state, gen, cfg).state
    assert purity(state) < 1.0  # decoherence mixes the state
    assert abs(conserved_norm(state) - state.purity0) < 1e-12
    # drift accrues at O(tau^2) per step; ~1e-7 each here
    assert hermiticity_drift(state) < 1e-4
    # the dense evolution agrees on how mixed the state has become
    want = evolve_exact(model, rho0, 0.5)
    want_purity = want.purity() / want.trace().real ** 2
    assert abs(purity(state) - want_purity) < 5e-3


def test_config_validation():
    basis = PauliBasis.full(2)
    with pytest.raises(ValueError):
        Algo1Config(tau=0.0, n_steps=1, basis=basis)
    with pytest.raises(ValueError):
        Algo1Config(tau=0.1, n_steps=-1, basis=basis)
    with pytest.raises(ValueError):
        Algo1Config(tau=0.1, n_steps=1, basis=basis, trotter_substeps=0)


# --- driver loop ------------------------------------------------------------


def test_run_records_full_trajectory():
    model = tls_model(1.0, 1.0, 1.0)
    rho0 = DensityMatrix.pure(StateVector.from_bits("1"))
    cfg = _full_cfg(0.05, 4, delta_reg=1e-6)
    traj = run(model, rho0, cfg, {"pop": PauliSum.from_label("Z")}, seed_label="7")
    assert traj.algorithm == "algo1"
    assert traj.seed == "7"
    assert_close(traj.times(), [0.0, 0.05, 0.1, 0.15, 0.2], 1e-12)
    pts = traj.points
    assert pts[0].raw_norm == 1.0
    assert abs(pts[0].purity - 1.0) < 1e-12
    assert set(pts[0].values) == {"pop"}
    want = evolve_exact(model, rho0, 0.2)
    want_z = float(np.real(np.trace(sum_matrix(Z_OBS) @ want.entries)))
    assert abs(pts[-1].values["pop"] - want_z) < 0.02  # first order in tau=0.05

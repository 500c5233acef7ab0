"""Model builders and vectorization against hand-built dense operators."""

import numpy as np
import pytest

from conftest import (
    assert_close,
    label_matrix,
    lindblad_superop,
    random_pauli_sum,
    random_unit,
    sum_matrix,
    unvec_col,
    vec_col,
)
from oqite.models import (
    LindbladModel,
    liouvillian,
    lowering,
    model_from_config,
    tfim_model,
    tls_model,
    unvec,
    vec,
    vectorize,
)
from oqite.pauli import PauliSum
from oqite.states import DensityMatrix, StateVector


def test_lowering_matrix():
    want = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    assert_close(sum_matrix(lowering(1, 0)), want, 0)
    # site index counts from the low-order qubit
    got = sum_matrix(lowering(2, 1))
    assert_close(got, np.kron(want, np.eye(2)), 0)


def test_tls_hamiltonian_and_jump():
    m = tls_model(1.0, 2.0, 4.0)
    want_h = -0.5 * label_matrix("Z") - 1.0 * label_matrix("X")
    assert_close(sum_matrix(m.hamiltonian), want_h, 1e-12)
    assert len(m.jumps) == 1
    want_j = 2.0 * np.array([[0, 1], [0, 0]])
    assert_close(sum_matrix(m.jumps[0]), want_j, 1e-12)


def test_tls_gamma_zero_drops_jumps():
    assert tls_model(1.0, 1.0, 0.0).jumps == ()
    assert tfim_model(2, 1.0, 1.0, 0.0).jumps == ()


def test_tfim_hamiltonian_open_chain():
    m = tfim_model(3, 1.5, 0.7, 0.0)
    want = (
        -1.5 * label_matrix("IZZ")
        - 1.5 * label_matrix("ZZI")
        - 0.7 * (label_matrix("IIX") + label_matrix("IXI") + label_matrix("XII"))
    )
    assert_close(sum_matrix(m.hamiltonian), want, 1e-12)


def test_tfim_per_site_jumps():
    m = tfim_model(2, 1.0, 1.0, 0.25)
    assert len(m.jumps) == 2
    low = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    assert_close(sum_matrix(m.jumps[0]), 0.5 * np.kron(np.eye(2), low), 1e-12)
    assert_close(sum_matrix(m.jumps[1]), 0.5 * np.kron(low, np.eye(2)), 1e-12)


def test_model_validation():
    with pytest.raises(ValueError):
        LindbladModel(1, PauliSum.from_text("1j*X"))
    with pytest.raises(ValueError):
        LindbladModel(2, PauliSum.from_label("X"))
    with pytest.raises(ValueError):
        tfim_model(0, 1.0, 1.0, 0.1)


def test_liouvillian_matches_dense_superoperator(rng):
    for model in (
        tls_model(1.0, 1.0, 1.0),
        tfim_model(2, 1.0, 1.0, 0.1),
        LindbladModel(
            2,
            random_pauli_sum(rng, 2, 3),
            (random_pauli_sum(rng, 2, 2, herm=False),),
        ),
    ):
        want = lindblad_superop(
            sum_matrix(model.hamiltonian),
            [sum_matrix(j) for j in model.jumps],
        )
        assert_close(sum_matrix(liouvillian(model)), want, 1e-10)


def test_liouvillian_action_is_master_equation(rng):
    model = tls_model(1.0, 1.0, 1.0)
    h = sum_matrix(model.hamiltonian)
    lm = sum_matrix(model.jumps[0])
    psi = random_unit(rng, 2)
    rho = np.outer(psi, psi.conj())
    want = (
        -1j * (h @ rho - rho @ h)
        + lm @ rho @ lm.conj().T
        - 0.5 * (lm.conj().T @ lm @ rho + rho @ lm.conj().T @ lm)
    )
    got = unvec_col(sum_matrix(liouvillian(model)) @ vec_col(rho))
    assert_close(got, want, 1e-12)


def test_vectorize_split_is_hermitian_and_reconstructs(rng):
    model = tfim_model(2, 1.0, 1.0, 0.3)
    gen = vectorize(model)
    assert gen.coherent.is_hermitian()
    assert gen.decay.is_hermitian()
    assert all(c.imag == 0 for c, _ in gen.coherent)
    assert all(c.imag == 0 for c, _ in gen.decay)
    rebuilt = -1j * sum_matrix(gen.coherent) - sum_matrix(gen.decay)
    assert_close(rebuilt, sum_matrix(liouvillian(model)), 1e-10)


def test_vec_is_column_stacking(rng):
    mat = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = DensityMatrix(2, mat)
    assert_close(vec(rho).amplitudes, vec_col(mat), 0)
    back = unvec(StateVector(4, vec_col(mat)))
    assert_close(back.entries, mat, 0)


def test_unvec_rejects_odd_register():
    with pytest.raises(ValueError):
        unvec(StateVector(3, np.zeros(8, dtype=np.complex128)))


# --- JSON model descriptions -------------------------------------------------


def test_model_from_config_tls_defaults():
    m = model_from_config({"type": "tls", "params": {}})
    assert_close(
        sum_matrix(m.hamiltonian),
        -0.5 * label_matrix("Z") - 0.5 * label_matrix("X"),
        1e-12,
    )
    assert len(m.jumps) == 1


def test_model_from_config_tfim():
    m = model_from_config(
        {"type": "tfim", "params": {"n": 2, "j": 1.0, "h": 1.0, "gamma": 0.1}}
    )
    assert m.n_qubits == 2
    assert len(m.jumps) == 2


def test_model_from_config_custom_terms():
    m = model_from_config(
        {
            "type": "custom",
            "custom": {
                "n": 2,
                "h_terms": [
                    {"coeff": [-1.0, 0.0], "string": "ZZ"},
                    {"coeff": [-0.5, 0.0], "string": "IX"},
                ],
                "jumps": [
                    [
                        {"coeff": [0.5, 0.0], "string": "IX"},
                        {"coeff": [0.0, 0.5], "string": "IY"},
                    ],
                    [],
                ],
            },
        }
    )
    want = -1.0 * label_matrix("ZZ") - 0.5 * label_matrix("IX")
    assert_close(sum_matrix(m.hamiltonian), want, 1e-12)
    # empty jump lists are dropped
    assert len(m.jumps) == 1
    want_jump = 0.5 * label_matrix("IX") + 0.5j * label_matrix("IY")
    assert_close(sum_matrix(m.jumps[0]), want_jump, 1e-12)


def test_model_from_config_rejects_bad_terms():
    # register mismatch between declared width and a term label
    with pytest.raises(ValueError):
        model_from_config(
            {
                "type": "custom",
                "custom": {"n": 2, "h_terms": [{"coeff": [1.0, 0.0], "string": "X"}]},
            }
        )
    # non-Hermitian Hamiltonian is refused by the model constructor
    with pytest.raises(ValueError):
        model_from_config(
            {
                "type": "custom",
                "custom": {"n": 1, "h_terms": [{"coeff": [0.0, 1.0], "string": "X"}]},
            }
        )

import numpy as np
import pytest

from diraclab import clifford
from diraclab.errors import ConfigError


@pytest.mark.parametrize("n", range(1, 7))
def test_relations_hold(n):
    g = clifford.build_gamma(n)
    assert g.dim_spinor == 2 ** (n // 2)
    assert g.anticommutation_defect() < 1e-12
    assert g.unitarity_defect() < 1e-12
    assert g.skew_hermitian_defect() < 1e-12
    g.validate()


def test_dimension_one_is_forced():
    g = clifford.build_gamma(1)
    assert g.generators[0].shape == (1, 1)
    assert abs(g.generators[0][0, 0] ** 2 + 1.0) < 1e-15


def test_rejects_nonpositive_dimension():
    with pytest.raises(ConfigError):
        clifford.build_gamma(0)


@pytest.mark.parametrize("n", range(1, 7))
def test_volume_element_squares_to_identity(n):
    g = clifford.build_gamma(n)
    omega = clifford.volume_element(g)
    assert np.max(np.abs(omega @ omega - np.eye(g.dim_spinor))) < 1e-12


@pytest.mark.parametrize("n", (1, 3, 5))
def test_odd_volume_element_is_identity(n):
    g = clifford.build_gamma(n)
    omega = clifford.volume_element(g)
    assert np.max(np.abs(omega - np.eye(g.dim_spinor))) < 1e-12


def test_even_volume_element_is_traceless():
    g = clifford.build_gamma(2)
    omega = clifford.volume_element(g)
    assert abs(np.trace(omega)) < 1e-12


def test_embedding_satisfies_relations():
    for n_amb in (2, 3, 4, 5):
        emb = clifford.alpha_embed(clifford.build_gamma(n_amb))
        assert emb.anticommutation_defect() < 1e-12


def test_embedding_volume_element_matches_ambient():
    # odd volume in even ambient dimension: built from e_i nu generators
    for m in (0, 1):
        amb = clifford.build_gamma(2 * m + 2)
        emb = clifford.alpha_embed(amb)
        assert np.max(np.abs(clifford.volume_element(emb) - clifford.volume_element(amb))) < 1e-12


def test_intertwiner_identity_case():
    g = clifford.build_gamma(2)
    res = clifford.find_intertwiner(g, g)
    assert res.equivalent and res.residual < 1e-12
    u = res.unitary
    assert np.max(np.abs(u.conj().T @ u - np.eye(2))) < 1e-12


def test_even_intrinsic_identification():
    a = clifford.build_gamma(2)
    b = clifford.alpha_embed(clifford.build_gamma(3))
    res = clifford.find_intertwiner(a, b)
    assert res.equivalent and res.residual < 1e-10


def test_odd_identification_on_positive_block():
    _, restricted = clifford.chirality_block(clifford.build_gamma(4), +1)
    res = clifford.find_intertwiner(clifford.build_gamma(3), restricted)
    assert res.equivalent and res.residual < 1e-10


def test_inequivalent_representations_detected():
    g = clifford.build_gamma(3)
    flipped = clifford.GammaSet(3, 2, tuple(-m for m in g.generators))
    res = clifford.find_intertwiner(g, flipped)
    assert not res.equivalent
    assert res.unitary is None


def test_chirality_projectors():
    for n_amb in (2, 3, 4, 5):
        split = clifford.chirality_split(clifford.build_gamma(n_amb))
        assert split.defect() < 1e-12
        op = split.defining_operator
        assert np.max(np.abs(op @ op - np.eye(op.shape[0]))) < 1e-12


def test_tangent_action_swaps_blocks_in_odd_ambient():
    # intrinsic dimension even: e_i nu anticommutes with the defining operator
    amb = clifford.build_gamma(3)
    split = clifford.chirality_split(amb)
    emb = clifford.alpha_embed(amb)
    for h in emb.generators:
        assert np.max(np.abs(h @ split.defining_operator + split.defining_operator @ h)) < 1e-12


def test_tangent_action_preserves_blocks_in_even_ambient():
    amb = clifford.build_gamma(4)
    split = clifford.chirality_split(amb)
    emb = clifford.alpha_embed(amb)
    for h in emb.generators:
        assert np.max(np.abs(h @ split.defining_operator - split.defining_operator @ h)) < 1e-12


def test_hermitian_metric_compatibility():
    rng = np.random.default_rng(7)
    for n in (2, 3, 4):
        g = clifford.build_gamma(n)
        d = g.dim_spinor
        for _ in range(200):
            x = rng.normal(size=n)
            y = rng.normal(size=n)
            phi = rng.normal(size=d) + 1j * rng.normal(size=d)
            gx = sum(c * m for c, m in zip(x, g.generators))
            gy = sum(c * m for c, m in zip(y, g.generators))
            lhs = np.vdot(gy @ phi, gx @ phi).real
            rhs = float(x @ y) * np.vdot(phi, phi).real
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
            assert abs(np.vdot(phi, gx @ phi).real) <= 1e-12 * np.vdot(phi, phi).real


def test_form_adjointness_signs():
    # one-forms act skew-adjointly, two-forms too (sign (-1)^{k(k+1)/2})
    rng = np.random.default_rng(11)
    g = clifford.build_gamma(4)
    d = g.dim_spinor
    for _ in range(50):
        phi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        one = sum(rng.normal() * m for m in g.generators)
        assert abs(np.vdot(psi, one @ phi) + np.vdot(one @ psi, phi)) < 1e-10
        two = g.generators[0] @ g.generators[1] + 0.3 * g.generators[2] @ g.generators[3]
        assert abs(np.vdot(psi, two @ phi) + np.vdot(two @ psi, phi)) < 1e-10

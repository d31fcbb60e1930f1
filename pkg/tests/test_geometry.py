import math

import numpy as np
import pytest

from spheremargin.errors import DimensionMismatch, ZeroVector
from spheremargin.geometry import (
    COS_CLAMP,
    ClassWeights,
    EmbeddingBatch,
    angles,
    clamp_cosines,
    cosine_matrix,
    inter_class_angles,
    normalize,
    normalize_rows,
)


def test_normalize_345_triangle():
    np.testing.assert_allclose(normalize([3.0, 4.0]), [0.6, 0.8], rtol=0, atol=1e-15)


def test_normalize_identity_case():
    np.testing.assert_array_equal(normalize([1.0, 0.0, 0.0]), [1.0, 0.0, 0.0])


def test_normalize_zero_vector_raises():
    with pytest.raises(ZeroVector):
        normalize([0.0, 0.0])


def test_normalize_idempotent():
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.standard_normal(5) * rng.uniform(0.1, 100)
        once = normalize(v)
        np.testing.assert_allclose(normalize(once), once, rtol=0, atol=1e-15)


def test_normalize_scale_invariant():
    rng = np.random.default_rng(1)
    for _ in range(20):
        v = rng.standard_normal(4)
        lam = rng.uniform(1e-3, 1e3)
        np.testing.assert_allclose(normalize(lam * v), normalize(v), rtol=0, atol=1e-12)


def test_cosine_matrix_orthonormal_clamped():
    batch = EmbeddingBatch(np.array([[1.0, 0.0]]), np.array([0]))
    weights = ClassWeights(np.array([[1.0, 0.0], [0.0, 1.0]]))
    cos = cosine_matrix(batch, weights)
    np.testing.assert_array_equal(cos, [[1.0 - COS_CLAMP, 0.0]])


def test_cosine_matrix_self_similarity():
    x = np.array([[0.6, 0.8]])
    batch = EmbeddingBatch(x, np.array([0]))
    weights = ClassWeights(x.copy())
    # pre-clamp dot is 1; the returned value is the clamped one
    assert float(x @ x.T) == pytest.approx(1.0, abs=1e-15)
    assert cosine_matrix(batch, weights)[0, 0] == 1.0 - COS_CLAMP


def test_cosine_matrix_60_degrees():
    batch = EmbeddingBatch(np.array([[1.0, 0.0]]), np.array([0]))
    weights = ClassWeights(np.array([[math.cos(math.pi / 3), math.sin(math.pi / 3)]]))
    assert cosine_matrix(batch, weights)[0, 0] == pytest.approx(0.5, abs=1e-12)


def test_cosine_matrix_dimension_mismatch():
    batch = EmbeddingBatch(np.array([[1.0, 0.0]]), np.array([0]))
    weights = ClassWeights(np.array([[1.0, 0.0, 0.0]]))
    with pytest.raises(DimensionMismatch):
        cosine_matrix(batch, weights)


def test_angles_examples():
    assert angles(1.0 - COS_CLAMP) == pytest.approx(0.0, abs=1e-3)
    assert angles(0.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert angles(0.5) == pytest.approx(1.0471975511965979, abs=1e-12)


def test_angles_roundtrip():
    theta = np.linspace(1e-3, math.pi - 1e-3, 500)
    np.testing.assert_allclose(angles(clamp_cosines(np.cos(theta))), theta, atol=1e-6)


def test_inter_class_angles_orthonormal_pair():
    w = ClassWeights(np.eye(2))
    d = inter_class_angles(w)
    assert d[0, 1] == pytest.approx(math.pi / 2, abs=1e-12)
    assert d[1, 0] == pytest.approx(math.pi / 2, abs=1e-12)


def test_inter_class_angles_uniform_octagon():
    phi = np.arange(8) * math.pi / 4
    w = ClassWeights(np.column_stack([np.cos(phi), np.sin(phi)]))
    d = inter_class_angles(w)
    for j in range(8):
        assert d[j, (j + 1) % 8] == pytest.approx(math.pi / 4, abs=1e-7)


def test_inter_class_angles_hand_value():
    w = ClassWeights(np.array([[1.0, 0.0], [math.cos(0.9), math.sin(0.9)]]))
    assert inter_class_angles(w)[0, 1] == pytest.approx(0.9, abs=1e-12)


def test_inter_class_angles_symmetric_zero_diagonal():
    rng = np.random.default_rng(2)
    for _ in range(10):
        w = ClassWeights(normalize_rows(rng.standard_normal((6, 4))))
        d = inter_class_angles(w)
        np.testing.assert_allclose(d, d.T, rtol=0, atol=1e-7)
        np.testing.assert_allclose(np.diag(d), 0.0, rtol=0, atol=1e-7)


def test_embedding_batch_rejects_non_unit_rows():
    with pytest.raises(ZeroVector):
        EmbeddingBatch(np.array([[1.0, 1.0]]), np.array([0]))


def test_embedding_batch_rejects_bad_labels():
    with pytest.raises(DimensionMismatch):
        EmbeddingBatch(np.array([[1.0, 0.0]]), np.array([-1]))

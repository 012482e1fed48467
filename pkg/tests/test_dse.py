import json
import statistics
import warnings

import numpy as np
import pytest

from dsekit.dse import (CheckpointSeries, ComponentRecord, MetricConfig, dse_components,
                        dse_series, lambda_from_series)
from dsekit.errors import DataError, DSEWarning, SeriesError
from dsekit.separability import SeparabilityConfig
from dsekit.tensor_io import EmbeddingBatch

from conftest import blob_batch


def recs(seps, dims, digest="d"):
    return [ComponentRecord(f"c{i}", float(s), float(m), digest)
            for i, (s, m) in enumerate(zip(seps, dims))]


def test_lambda_unit_ratio():
    assert lambda_from_series(recs([0, 2], [1, 3])) == pytest.approx(1.0)


def test_lambda_matches_pstdev_ratio():
    # [10, 11, 14] is [1, 2, 5] shifted, not [1, 2, 4]: the ratio is not 1
    expected = statistics.pstdev([1, 2, 4]) / statistics.pstdev([10, 11, 14])
    assert lambda_from_series(recs([1, 2, 4], [10, 11, 14])) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.7337993857053428, rel=1e-12)
    assert lambda_from_series(recs([1, 2, 4], [10, 11, 13])) == pytest.approx(1.0, rel=1e-12)


def test_lambda_population_std():
    assert lambda_from_series(recs([0, 4], [0, 1])) == pytest.approx(4.0)


def test_constant_m_dim_warns_and_zeroes():
    with pytest.warns(DSEWarning):
        lam = lambda_from_series(recs([0, 4], [5, 5]))
    assert lam == 0.0


def test_series_scores():
    s = dse_series(recs([0, 2], [1, 3]))
    assert s.lam == pytest.approx(1.0)
    np.testing.assert_allclose(s.scores, [1.0, 5.0])
    assert s.lambda_source == "estimated"


def test_override_bypasses_estimate():
    s = dse_series(recs([1], [2]), lambda_override=0.5)
    assert s.lambda_source == "override"
    np.testing.assert_allclose(s.scores, [2.0])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        dse_series(recs([1, 2], [3, 3]), lambda_override=0.0)


def test_series_errors():
    with pytest.raises(SeriesError):
        dse_series(recs([1], [2]))
    mixed = recs([1], [2], "a") + recs([3], [4], "b")
    with pytest.raises(SeriesError):
        dse_series(mixed)
    with pytest.raises(SeriesError):
        dse_series(mixed, lambda_override=1.0)
    with pytest.raises(SeriesError):
        dse_series([], lambda_override=1.0)


def test_override_ablations():
    s = dse_series(recs([0.5, 1.5], [3.0, 2.0]), lambda_override=0.0)
    np.testing.assert_array_equal(s.scores, [0.5, 1.5])
    s = dse_series(recs([0.0, 0.0], [3.0, 2.0]), lambda_override=1.0)
    np.testing.assert_array_equal(s.scores, [3.0, 2.0])


def test_uniform_rescale_keeps_lambda_and_ranking(rng):
    seps, dims = rng.standard_normal(8), rng.standard_normal(8) + 5
    a = dse_series(recs(seps, dims))
    b = dse_series(recs(3 * seps, 3 * dims))
    assert b.lam == pytest.approx(a.lam, rel=1e-12)
    np.testing.assert_allclose(b.scores, 3 * a.scores, rtol=1e-12)
    assert np.argsort(a.scores).tolist() == np.argsort(b.scores).tolist()


def test_rescaling_m_dim_preserves_scores(rng):
    seps, dims = rng.standard_normal(6), rng.standard_normal(6) + 5
    a = dse_series(recs(seps, dims))
    b = dse_series(recs(seps, 7.5 * dims))
    np.testing.assert_allclose(a.scores, b.scores, rtol=1e-12)


def test_non_finite_record():
    with pytest.raises(DataError):
        ComponentRecord("x", float("nan"), 1.0, "d")


def test_round_trip():
    s = dse_series(recs([0.1, 0.7, 0.3], [2.0, 3.5, 2.2]))
    back = CheckpointSeries.from_dict(json.loads(s.to_json()))
    assert back.records == s.records and back.lam == s.lam
    np.testing.assert_array_equal(back.scores, s.scores)
    lines = s.to_csv().splitlines()
    assert lines[0] == "source_id,cls_sep,m_dim,dse"
    assert float(lines[2].split(",")[3]) == s.scores[1]


def test_from_dict_malformed():
    with pytest.raises(SeriesError):
        CheckpointSeries.from_dict({"records": [{"source_id": "a"}]})


def test_components_on_blobs():
    batch = blob_batch(num_images=8)
    batch = EmbeddingBatch(batch.data, source_id="ckpt")
    r1 = dse_components(batch, seed=3)
    r2 = dse_components(batch, seed=3)
    assert r1 == r2 and r1.source_id == "ckpt"
    assert r1.cls_sep > 0 and r1.m_dim >= 1.0
    assert r1.config_digest != dse_components(batch, seed=4).config_digest


def test_b_prime_clamped_to_batch():
    batch = blob_batch(num_images=8)
    cfg = MetricConfig(b_prime=10_000)
    assert dse_components(batch, cfg).m_dim == dse_components(batch, MetricConfig(b_prime=8)).m_dim


def test_zero_batch_names_source():
    cfg = MetricConfig(SeparabilityConfig(((1, 2),)))
    with pytest.raises(DataError, match="^dead"):
        dse_components(EmbeddingBatch(np.zeros((2, 5, 3)), source_id="dead"), cfg)

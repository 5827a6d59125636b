import math

import pytest

import vinfo


@pytest.fixture(scope="module")
def planted():
    return vinfo.generate_planted(n=4000, vocab_size=800, seed=3)


def test_closed_form():
    assert vinfo.planted_information_bits(2, 0.1) == pytest.approx(0.531, abs=1e-3)
    assert vinfo.planted_information_bits(2, 0.5) == pytest.approx(0.0, abs=1e-12)


def test_planted_recovery_and_identity(planted):
    a = vinfo.pvi(planted.train, planted.dev, planted.test, seed=1)
    assert len(a.records) == len(planted.test)
    assert abs(a.summary.v_information_bits - planted.true_info_bits) <= 0.05
    mean = sum(r.pvi_bits for r in a.records) / len(a.records)
    assert a.summary.v_information_bits == mean


def test_encryption_collapses(planted):
    enc = [vinfo.apply_transform(d, "sentence_encrypt", seed=4) for d in (planted.train, planted.dev, planted.test)]
    assert vinfo.pvi(*enc, seed=1).summary.v_information_bits <= 0.05


def test_correlation_and_errors(planted):
    a = vinfo.pvi(planted.train, planted.dev, planted.test, seed=1)
    assert vinfo.pvi_correlation(a.records, a.records) == 1.0
    with pytest.raises(vinfo.ConfigError):
        vinfo.apply_transform(planted.test, "shuffle")
    with pytest.raises(vinfo.ConfigError):
        vinfo.apply_transform(planted.test, "rot13", seed=1)


def test_dataset_round_trip(planted, tmp_path):
    path = tmp_path / "test.jsonl"
    vinfo.write_dataset(planted.test, path)
    back = vinfo.read_dataset(path)
    assert len(back) == len(planted.test)
    assert back.labels == planted.test.labels
    assert back.instances[0].fields == planted.test.instances[0].fields


def test_cli_usage():
    code, _, err = vinfo.run_cli(["frobnicate"])
    assert code == 2
    assert err
    assert math.isfinite(vinfo.planted_information_bits(3, 0.2))

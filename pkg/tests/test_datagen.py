import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.ndimage import gaussian_filter1d

from qborn.datagen import (
    BiGaussConfig,
    LabeledSample,
    XorConfig,
    XOR_CENTERS,
    config_dict,
    format_csv,
    gen_bigaussian,
    gen_xor,
    parse_csv,
    read_csv,
    train_test_split,
    write_csv,
)
from qborn.errors import DataError
from qborn.estimator import build_labeled_state, classify_exact
from qborn.oracle import roc_auc
from qborn.qfm import LabelEncoding, SinCosQfm


class TestXor:
    def test_counts_and_labels(self):
        data = gen_xor()
        assert len(data) == 400
        assert [s.label for s in data].count(1) == 200

    def test_degenerate_blobs(self):
        data = gen_xor(XorConfig(n_per_blob=5, blob_std=0.0))
        assert len(data) == 20
        assert {s.features for s in data} == set(XOR_CENTERS)

    def test_clipped(self):
        feats = np.array([s.features for s in gen_xor(XorConfig(blob_std=0.5, seed=1))])
        assert feats.min() >= 0.0 and feats.max() <= 1.0

    def test_deterministic(self):
        assert gen_xor(XorConfig(seed=4)) == gen_xor(XorConfig(seed=4))
        assert gen_xor(XorConfig(seed=4)) != gen_xor(XorConfig(seed=5))

    def test_linear_baseline_fails_quantum_succeeds(self):
        from sklearn.linear_model import LogisticRegression

        train, test = train_test_split(gen_xor(XorConfig(seed=7)), 1 / 3, seed=8)
        Xtr = np.array([s.features for s in train])
        ytr = np.array([s.label for s in train])
        Xte = np.array([s.features for s in test])
        yte = np.array([s.label for s in test])
        lin = LogisticRegression().fit(Xtr, ytr)
        assert roc_auc(lin.predict_proba(Xte)[:, 1], yte == 2) <= 0.65

        qfm, enc = SinCosQfm(2), LabelEncoding("basis", 2)
        Psi = build_labeled_state(Xtr, ytr, qfm, enc)
        scores = [classify_exact(Psi, x, qfm, enc).conditional[1] for x in Xte]
        assert roc_auc(scores, yte == 2) > 0.99

    def test_bad_config(self):
        with pytest.raises(ValueError):
            XorConfig(n_per_blob=0)
        with pytest.raises(ValueError):
            LabeledSample((0.1,), 0)


class TestBiGaussian:
    def test_single_component_clt(self):
        cfg = BiGaussConfig(n=2000, weights=(1.0, 0.0), seed=3)
        x = gen_bigaussian(cfg)
        assert abs(x.mean() - 0.3) <= 3 * 0.05 / np.sqrt(cfg.n)

    def test_zero_spread(self):
        x = gen_bigaussian(BiGaussConfig(stds=(0.0, 0.0)))
        assert set(np.unique(x)) <= {0.3, 0.7}

    def test_bimodal(self):
        x = gen_bigaussian()
        assert x.shape == (200,)
        # fine histogram smoothed over one component width (0.05 = 10 bins)
        hist, edges = np.histogram(x, bins=np.linspace(0, 1, 201))
        centers = 0.5 * (edges[1:] + edges[:-1])
        smooth = gaussian_filter1d(hist.astype(float), 10)
        half = centers < 0.5
        left = centers[half][np.argmax(smooth[half])]
        right = centers[~half][np.argmax(smooth[~half])]
        assert abs(left - 0.3) <= 0.02 and abs(right - 0.7) <= 0.02

    def test_weights_validated(self):
        with pytest.raises(ValueError):
            BiGaussConfig(weights=(0.6, 0.6))

    def test_config_dict(self):
        assert config_dict(BiGaussConfig())["means"] == [0.3, 0.7]


def test_split_is_partition():
    data = gen_xor(XorConfig(n_per_blob=10))
    train, test = train_test_split(data, 0.25, seed=0)
    assert len(test) == 10 and sorted(train + test, key=repr) == sorted(data, key=repr)


class TestCsv:
    def test_round_trip_labeled(self, tmp_path, rng):
        samples = [LabeledSample(tuple(rng.uniform(0, 1, 2)), int(rng.integers(1, 3))) for _ in range(100)]
        write_csv(tmp_path / "d.csv", samples)
        table = read_csv(tmp_path / "d.csv", require_label=True)
        assert table.samples() == samples

    def test_round_trip_unlabeled(self, tmp_path, rng):
        x = rng.normal(size=100)
        write_csv(tmp_path / "d.csv", x)
        table = read_csv(tmp_path / "d.csv")
        assert not table.labeled and np.array_equal(table.features[:, 0], x)

    @settings(max_examples=50)
    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
    def test_exact_floats(self, xs):
        assert parse_csv(format_csv(np.array(xs))).features[:, 0].tolist() == [float(v) for v in xs]

    def test_lf_endings(self):
        assert "\r" not in format_csv(np.zeros(3))

    def test_missing_label(self):
        with pytest.raises(DataError, match="'label'"):
            parse_csv("x1,x2\n0.1,0.2\n", require_label=True)

    def test_empty_file(self, tmp_path):
        (tmp_path / "e.csv").write_text("")
        with pytest.raises(DataError, match="empty"):
            read_csv(tmp_path / "e.csv")

    def test_header_only(self):
        with pytest.raises(DataError, match="no data"):
            parse_csv("x1\n")

    def test_bad_row(self):
        with pytest.raises(DataError, match="line 3"):
            parse_csv("x1,label\n0.1,1\nabc,2\n")

    def test_bad_header(self):
        with pytest.raises(DataError, match="header"):
            parse_csv("a,b\n1,2\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            read_csv(tmp_path / "nope.csv")

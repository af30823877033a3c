"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (printed in the terminal summary) before
asserting, so a failing criterion still reports its measured numbers.
"""
import time

import numpy as np
import pytest
from scipy.ndimage import uniform_filter1d
from scipy.signal import argrelmax
from scipy.stats import pearsonr

from qborn.circuit import GateCircuit, NoiseSpec, born_probabilities, sample_shots, sample_shots_noisy
from qborn.cli import main
from qborn.datagen import BiGaussConfig, XorConfig, gen_bigaussian, gen_xor
from qborn.estimator import (
    build_dataset_state,
    build_labeled_state,
    classify_circuit,
    classify_exact,
    classify_joint,
    density_circuit,
    density_circuit_probability,
    density_exact,
    reduced_label_state,
)
from qborn.oracle import KdeConfig, kde, roc_auc
from qborn.qfm import LabelEncoding, RffQfm, SinCosQfm, rff_features, rff_sample_params
from qborn.rng import stream
from qborn.statevec import expectation
from qborn.stateprep import cnot_bound, prepare_state

from conftest import random_circuit, random_state, record_acceptance

pytestmark = pytest.mark.acceptance

GAMMA, D_DEFAULT = 80.0, 8


@pytest.fixture(scope="module")
def bigauss_model():
    data = gen_bigaussian(BiGaussConfig())
    qfm = RffQfm(rff_sample_params(D_DEFAULT, GAMMA, seed=0))
    return data, qfm, build_dataset_state(data[:, None], qfm)


def test_criterion_1_state_preparation_bound():
    rng = stream(1)
    start = time.perf_counter()
    worst_fid, over = 1.0, 0
    for n in range(1, 7):
        for _ in range(20):
            rep = prepare_state(random_state(rng, n))
            worst_fid = min(worst_fid, rep.fidelity)
            over += rep.cnot_count > cnot_bound(n)
    elapsed = time.perf_counter() - start
    ok = worst_fid >= 1 - 1e-9 and over == 0 and elapsed < 10
    record_acceptance(1, ok, f"min fidelity {worst_fid:.15f}, bound violations {over}, {elapsed:.2f}s")
    assert ok


def test_criterion_2_circuit_matches_overlap():
    rng = stream(2)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        d = int(rng.integers(1, 5))
        qfm = SinCosQfm(d)
        Psi = build_dataset_state(rng.uniform(0, 1, (int(rng.integers(1, 30)), d)), qfm)
        q = rng.uniform(0, 1, d)
        overlap = abs(np.vdot(Psi.state.amplitudes, qfm.amplitudes(q))) ** 2
        worst = max(worst, abs(density_circuit_probability(Psi, q, qfm) - overlap))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 5
    record_acceptance(2, ok, f"max |P(0) - overlap| {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_3_classification_dual_path():
    rng = stream(3)
    qfm = SinCosQfm(2)
    worst = 0.0
    for kind in ("onehot", "basis"):
        enc = LabelEncoding(kind, 2)
        done = 0
        while done < 50:
            n = int(rng.integers(1, 20))
            Psi = build_labeled_state(rng.uniform(0, 1, (n, 2)), rng.integers(1, 3, n), qfm, enc)
            q = rng.uniform(0, 1, 2)
            rho = reduced_label_state(Psi, q, qfm, enc)
            if rho is None:
                continue
            joint = classify_joint(Psi, q, qfm, enc)
            cond = np.array([expectation(rho, enc(k)) for k in (1, 2)])
            worst = max(worst, float(np.max(np.abs(cond - joint / joint.sum()))))
            done += 1
    ok = worst <= 1e-10
    record_acceptance(3, ok, f"max |trace form - joint/sum| {worst:.2e} over 100 instances")
    assert ok


def _xor_split(seed):
    train = gen_xor(XorConfig(seed=seed))
    test = gen_xor(XorConfig(n_per_blob=50, seed=seed + 100))
    X = np.array([s.features for s in train])
    y = np.array([s.label for s in train])
    Xt = np.array([s.features for s in test])
    yt = np.array([s.label for s in test])
    return X, y, Xt, yt


@pytest.mark.slow
def test_criterion_4_xor():
    qfm, enc = SinCosQfm(2), LabelEncoding("basis", 2)
    exact_aucs, gaps = [], []
    for seed in range(5):
        X, y, Xt, yt = _xor_split(seed)
        Psi = build_labeled_state(X, y, qfm, enc)
        exact = [classify_exact(Psi, x, qfm, enc).conditional[1] for x in Xt]
        exact_aucs.append(roc_auc(exact, yt == 2))
        shots = [classify_circuit(Psi, x, qfm, enc, 4096, seed, NoiseSpec(), (i,),
                                  force_trajectories=True).conditional[1]
                 for i, x in enumerate(Xt)]
        gaps.append(abs(roc_auc(shots, yt == 2) - exact_aucs[-1]))
    ok = min(exact_aucs) >= 0.99 and max(gaps) <= 0.005
    record_acceptance(4, ok, f"exact AUC per seed {[round(a, 4) for a in exact_aucs]}, "
                             f"max zero-noise trajectory gap {max(gaps):.4f}")
    assert ok


def test_criterion_5_shot_coverage(bigauss_model):
    _, qfm, Psi = bigauss_model
    covered = 0
    for i, x in enumerate(np.linspace(0, 1, 100)):
        exact = density_exact(Psi, [x], qfm).value
        est = density_circuit(Psi, [x], qfm, 1024, seed=0, stream_key=(i,))
        covered += abs(est.value - exact) <= 3 * est.stderr
    ok = covered >= 97
    record_acceptance(5, ok, f"{covered}/100 grid queries within 3 stderr at M=1024")
    assert ok


def test_criterion_6_rff_kernel():
    rng = stream(6)
    x = rng.uniform(0, 1, 100)
    delta = rng.uniform(-0.3, 0.3, 100)
    target = np.exp(-GAMMA * delta ** 2)
    maes, max_err = [], None
    for D in (8, 64, 512, 2048):
        p = rff_sample_params(D, GAMMA, seed=0)
        approx = np.array([rff_features([a], p) @ rff_features([a + d], p) for a, d in zip(x, delta)])
        err = np.abs(approx - target)
        maes.append(float(err.mean()))
        max_err = float(err.max())
    monotone = all(a > b for a, b in zip(maes, maes[1:]))
    ok = max_err <= 0.05 and monotone
    record_acceptance(6, ok, f"D=2048 max error {max_err:.4f}, MAE by D {[round(m, 4) for m in maes]}")
    assert ok


def test_criterion_7_density_curve(bigauss_model):
    data, qfm, Psi = bigauss_model
    grid = np.linspace(0, 1, 201)
    curve = np.array([density_exact(Psi, [g], qfm).value for g in grid])
    smooth = uniform_filter1d(curve, 5, mode="nearest")
    peaks = grid[argrelmax(smooth, mode="clip")[0]]
    near = len(peaks) == 2 and abs(peaks[0] - 0.3) <= 0.05 and abs(peaks[1] - 0.7) <= 0.05
    ref = np.array([kde(data, g, KdeConfig(GAMMA)) for g in grid])
    r = float(pearsonr(curve, ref)[0])
    ok = near and r >= 0.85
    record_acceptance(7, ok, f"maxima at {np.round(peaks, 3).tolist()}, Pearson r vs KDE {r:.3f}")
    assert ok


def test_criterion_8_noise_model():
    rng = stream(8)
    worst_tv = 0.0
    for trial in range(5):
        c = random_circuit(rng, 3, 25)
        rec = sample_shots_noisy(c, NoiseSpec(), 10**5, seed=trial, force_trajectories=True)
        worst_tv = max(worst_tv, 0.5 * float(np.abs(rec.frequencies() - born_probabilities(c)).sum()))
    flip = sample_shots_noisy(GateCircuit(1), NoiseSpec(p_readout_flip=1.0), 1000, seed=0)
    same = sample_shots_noisy(GateCircuit(2), NoiseSpec(), 500, seed=1) == sample_shots(GateCircuit(2), 500, seed=1)
    ok = worst_tv < 0.02 and flip.counts == {"1": 1000} and same
    record_acceptance(8, ok, f"max TV {worst_tv:.4f}, readout flip counts {flip.counts}")
    assert ok


def test_criterion_9_cli_determinism(tmp_path):
    def run(tag):
        d = tmp_path / tag
        d.mkdir()
        cmds = [
            ["gen-data", "xor", "--seed", "7", "--out", str(d / "xor.csv")],
            ["gen-data", "xor", "--n-per-blob", "10", "--seed", "8", "--out", str(d / "xt.csv")],
            ["gen-data", "bigauss", "--seed", "3", "--out", str(d / "bg.csv")],
            ["fit", str(d / "xor.csv"), "--out", str(d / "xor.json")],
            ["fit", str(d / "bg.csv"), "--qfm", "rff", "--seed", "2", "--out", str(d / "bg.json")],
            ["density", str(d / "bg.json"), "--grid", "0", "1", "41", "--seed", "4", "--noise-1q", "0.01",
             "--noise-2q", "0.02", "--noise-readout", "0.01", "--noise-reset", "0.01", "--compare-kde",
             "--out", str(d / "dens.csv")],
            ["classify", str(d / "xor.json"), "--queries", str(d / "xt.csv"), "--shots", "512", "--seed", "5",
             "--noise-2q", "0.02", "--out", str(d / "cls.csv")],
        ]
        for cmd in cmds:
            assert main(cmd) == 0
        return {p.name: p.read_bytes() for p in sorted(d.iterdir())}

    first, second = run("a"), run("b")
    differing = sorted(k for k in first if first[k] != second.get(k))
    ok = not differing and len(first) == 12
    record_acceptance(9, ok, f"{len(first)} output files compared, differing: {differing or 'none'}")
    assert ok

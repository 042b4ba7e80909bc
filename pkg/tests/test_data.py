import numpy as np
import pytest
from PIL import Image

from jpcem.classify import src_single_baseline
from jpcem.data import (Sample, SynthConfig, export_dataset, load_image,
                        load_manifest, load_samples, split_random, synth_generate)
from jpcem.dictionary import build_dictionary
from jpcem.exceptions import CountError, IngestionError, InvalidConfigError


def _by_group(samples):
    out = {}
    for s in samples:
        out.setdefault((s.class_id, s.view_id), []).append(s.vector)
    return {k: np.column_stack(v) for k, v in out.items()}


def test_noiseless_samples_lie_in_subspace():
    cfg = SynthConfig(num_classes=3, num_views=2, ambient_dim=30, subspace_dim=3,
                      train_per_view_per_class=6, test_per_view_per_class=4,
                      noise_std=0.0, seed=5)
    train, test = synth_generate(cfg)
    assert len(train) == 3 * 2 * 6 and len(test) == 3 * 2 * 4
    tr, te = _by_group(train), _by_group(test)
    for key, A in tr.items():
        np.testing.assert_allclose(np.linalg.norm(A, axis=0), 1.0, atol=1e-12)
        Q, _ = np.linalg.qr(A)
        Q = Q[:, :3]
        for B in (A, te[key]):
            resid = B - Q @ (Q.T @ B)
            assert np.max(np.linalg.norm(resid, axis=0)) <= 1e-10


def test_synth_is_deterministic():
    cfg = SynthConfig(num_classes=2, num_views=2, ambient_dim=10, seed=42)
    a, b = synth_generate(cfg), synth_generate(cfg)
    for xs, ys in zip(a, b):
        for s, t in zip(xs, ys):
            assert s.vector.tobytes() == t.vector.tobytes()
            assert (s.class_id, s.view_id, s.role) == (t.class_id, t.view_id, t.role)
    c = synth_generate(SynthConfig(num_classes=2, num_views=2, ambient_dim=10, seed=43))
    assert a[0][0].vector.tobytes() != c[0][0].vector.tobytes()


def test_synth_noise_is_clipped():
    train, _ = synth_generate(SynthConfig(ambient_dim=10, noise_std=5.0, num_views=1,
                                          num_classes=1))
    assert max(np.abs(s.vector).max() for s in train) <= 1.0


def test_synth_config_errors():
    with pytest.raises(InvalidConfigError):
        synth_generate(SynthConfig(ambient_dim=3, subspace_dim=4))
    with pytest.raises(InvalidConfigError):
        synth_generate(SynthConfig(train_per_view_per_class=0))
    with pytest.raises(InvalidConfigError):
        synth_generate(SynthConfig(noise_std=-1.0))


def test_noiseless_subspaces_are_separable():
    cfg = SynthConfig(num_classes=2, num_views=1, ambient_dim=20, subspace_dim=3,
                      train_per_view_per_class=10, test_per_view_per_class=5,
                      noise_std=0.0, seed=0)
    train, test = synth_generate(cfg)
    D = build_dictionary((s.class_id, s.view_id, s.vector) for s in train)
    preds = [src_single_baseline(D, s.vector).predicted_class for s in test]
    assert preds == [s.class_id for s in test]


def _pool(n, d=3):
    rng = np.random.default_rng(0)
    return [Sample(rng.standard_normal(d), c, v) for c in (1, 2) for v in (1, 2)
            for _ in range(n)]


def test_split_disjoint_and_deterministic():
    pool = _pool(12)
    train, test = split_random(pool, 5, 4, seed=9)
    assert len(train) == 4 * 5 and len(test) == 4 * 4
    ids = lambda xs: {id(s.vector) for s in xs}
    assert not ids(train) & ids(test)
    assert all(s.role == "train" for s in train) and all(s.role == "test" for s in test)
    again = split_random(pool, 5, 4, seed=9)
    assert [id(s.vector) for s in again[0]] == [id(s.vector) for s in train]
    other = split_random(pool, 5, 4, seed=10)
    assert [id(s.vector) for s in other[0]] != [id(s.vector) for s in train]


def test_split_edge_cases():
    pool = _pool(6)
    train, test = split_random(pool, 6, 0, seed=1)
    assert len(train) == len(pool) and test == []
    with pytest.raises(CountError, match=r"class 1, view 1"):
        split_random(pool, 5, 2, seed=1)


def test_split_large_counts():
    pool = _pool(177, d=2)
    train, test = split_random(pool, 127, 50, seed=0)
    assert len(train) == 4 * 127 and len(test) == 4 * 50


def _write(path, array, mode="L"):
    Image.fromarray(np.asarray(array, dtype=np.uint8)).convert(mode).save(path)


def test_load_constant_image(tmp_path):
    p = tmp_path / "white.pgm"
    _write(p, np.full((20, 40), 255))
    v = load_image(p)
    assert v.shape == (800,)
    np.testing.assert_array_equal(v, 1.0)


def test_load_rescales(tmp_path):
    rng = np.random.default_rng(0)
    big = rng.integers(0, 256, size=(40, 80))
    p = tmp_path / "big.pgm"
    _write(p, big)
    v = load_image(p)
    assert v.shape == (800,)
    expected = np.asarray(Image.open(p).resize((40, 20), Image.BILINEAR), float) / 255
    np.testing.assert_array_equal(v.reshape(20, 40), expected)


def test_row_major_round_trip(tmp_path):
    img = np.arange(800).reshape(20, 40) % 256
    p = tmp_path / "ramp.pgm"
    _write(p, img)
    np.testing.assert_array_equal(load_image(p).reshape(20, 40) * 255, img)


def test_ingestion_errors_name_the_path(tmp_path):
    rgb = tmp_path / "color.ppm"
    _write(rgb, np.zeros((20, 40)), mode="RGB")
    with pytest.raises(IngestionError, match="color.ppm"):
        load_image(rgb)
    with pytest.raises(IngestionError, match="missing.pgm"):
        load_image(tmp_path / "missing.pgm")
    junk = tmp_path / "junk.pgm"
    junk.write_bytes(b"P5\n40 20\n255\n\x00\x01")
    with pytest.raises(IngestionError, match="junk.pgm"):
        load_image(junk)


def test_manifest_pass_through(tmp_path):
    for name in ("a.pgm", "b.pgm"):
        _write(tmp_path / name, np.full((20, 40), 51))
    m = tmp_path / "m.csv"
    m.write_text("path,class,view,role\na.pgm,3,2,train\nb.pgm,3,2,test\n")
    manifest = load_manifest(m)
    samples = load_samples(manifest)
    assert [(s.class_id, s.view_id, s.role) for s in samples] == [(3, 2, "train"),
                                                                   (3, 2, "test")]
    np.testing.assert_allclose(samples[1].vector, 0.2)
    assert samples[1].source.endswith("b.pgm")


@pytest.mark.parametrize("body, match", [
    ("file,class,view,role\na.pgm,1,1,train\n", "header"),
    ("path,class,view,role\na.pgm,1,1,train\na.pgm,1,1,train\n", "duplicate"),
    ("path,class,view,role\na.pgm,1,1,train\nb.pgm,1,2,test\n", "no train entry"),
    ("path,class,view,role\na.pgm,1,1,validate\n", "role"),
])
def test_manifest_errors(tmp_path, body, match):
    m = tmp_path / "m.csv"
    m.write_text(body)
    with pytest.raises(IngestionError, match=match):
        load_manifest(m)
    with pytest.raises(IngestionError, match="nope.csv"):
        load_manifest(tmp_path / "nope.csv")


def test_export_and_reload(tmp_path):
    cfg = SynthConfig(num_classes=2, num_views=2, ambient_dim=12, subspace_dim=2,
                      train_per_view_per_class=2, test_per_view_per_class=1, seed=3)
    train, test = synth_generate(cfg)
    path = export_dataset(train + test, tmp_path / "ds", width=4, height=3)
    samples = load_samples(load_manifest(path, 4, 3))
    assert len(samples) == len(train) + len(test)
    for orig, back in zip(train + test, samples):
        assert (orig.class_id, orig.view_id, orig.role) == (back.class_id, back.view_id,
                                                            back.role)
        # affine map [-1, 1] -> [0, 1], quantized to 8 bits
        np.testing.assert_allclose(back.vector, (orig.vector + 1) / 2, atol=0.5 / 255 + 1e-12)

import json

import numpy as np
import pytest

from phashbench import harness as H
from phashbench.errors import (CorpusTooSmall, EmptyCorpus, FormatError, LengthInconsistency, MissingHashes,
                               UnknownAlgorithm, UnreadablePath)
from phashbench.hashalgos import ALGORITHMS, hash_image
from phashbench.imageio import encode_png

from conftest import noise_image, smooth_image


def make_corpus(root, n, dupes=0, size=(48, 40)):
    root.mkdir(parents=True, exist_ok=True)
    for i in range(n):
        (root / f"img{i:03d}.png").write_bytes(encode_png(smooth_image(i, *size)))
    for j in range(dupes):
        (root / f"zdup{j}.png").write_bytes((root / f"img{j:03d}.png").read_bytes())
    return root


@pytest.fixture(scope="module")
def corpus60(tmp_path_factory):
    return make_corpus(tmp_path_factory.mktemp("c60"), 60, size=(64, 48))


@pytest.fixture(scope="module")
def hashed60(corpus60, tmp_path_factory):
    idx = H.ingest_corpus(corpus60)
    m = H.RunManifest(k_neighbours=10, modifications=["mirror", "crop"], corpus_digest=idx.digest,
                      n_images=len(idx))
    store = H.HashStore(tmp_path_factory.mktemp("s60") / "hashes.tsv")
    for v in ("original", "mirror", "crop"):
        H.hash_corpus(idx, ALGORITHMS, v, store, manifest=m)
    return idx, m, store


# -- ingestion ---------------------------------------------------------------

def test_ingest_dedup_identical_pair(tmp_path):
    make_corpus(tmp_path, 2)
    (tmp_path / "img001.png").write_bytes((tmp_path / "img000.png").read_bytes())
    (tmp_path / "third.png").write_bytes(encode_png(noise_image(9, 8, 8)))
    idx = H.ingest_corpus(tmp_path)
    assert idx.ids == ["img000", "third"]
    assert idx.duplicates == (("img001", "img000"),)
    assert len(H.ingest_corpus(tmp_path, dedup=False)) == 3


def test_ingest_100_with_3_duplicates(tmp_path):
    make_corpus(tmp_path, 97, dupes=3, size=(16, 12))
    assert len(H.ingest_corpus(tmp_path)) == 97
    assert len(H.ingest_corpus(tmp_path, dedup=False)) == 100


def test_ingest_ids_and_errors(tmp_path):
    sub = tmp_path / "a" / "b"
    sub.mkdir(parents=True)
    (sub / "x.png").write_bytes(encode_png(noise_image(1, 8, 8)))
    (sub / "x.jpg").write_bytes(encode_png(noise_image(2, 8, 8)))
    (tmp_path / "notes.txt").write_text("ignored")
    assert H.ingest_corpus(tmp_path).ids == ["a/b/x.jpg", "a/b/x.png"]
    with pytest.raises(UnreadablePath):
        H.ingest_corpus(tmp_path / "missing")
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(EmptyCorpus):
        H.ingest_corpus(empty)


# -- sampling ----------------------------------------------------------------

def test_sample_pairs_properties(tmp_path):
    idx = H.ingest_corpus(make_corpus(tmp_path, 30, size=(8, 8)))
    pairs = H.sample_pairs(idx, seed=7, k=5)
    assert len(pairs) == 30 * 5
    assert all(a != b for a, b in pairs)
    per = {}
    for a, b in pairs:
        per.setdefault(a, []).append(b)
    assert all(len(set(v)) == 5 for v in per.values())
    assert pairs == H.sample_pairs(idx, seed=7, k=5)
    assert pairs != H.sample_pairs(idx, seed=8, k=5)
    with pytest.raises(CorpusTooSmall):
        H.sample_pairs(idx, seed=7, k=30)


def test_partner_draw_is_local_to_the_image():
    ids = [f"i{n}" for n in range(20)]
    a = H.partner_indices(ids, 3, 4)
    b = H.partner_indices(ids, 3, 4)
    assert np.array_equal(a, b)
    # the draw for one id depends only on the seed, id and corpus size
    assert np.array_equal(H.image_rng(3, "i5").choice(19, 4, replace=False),
                          H.image_rng(3, "i5").choice(19, 4, replace=False))


# -- hashing and the store ---------------------------------------------------

def test_hash_100_images_and_rerun(tmp_path):
    idx = H.ingest_corpus(make_corpus(tmp_path / "c", 100, size=(32, 24)))
    store = H.HashStore(tmp_path / "hashes.tsv")
    s = H.hash_corpus(idx, ALGORITHMS, "original", store)
    assert s.total_new == 500 and len(store) == 500 and not s.failures
    store.save()
    before = (tmp_path / "hashes.tsv").read_bytes()
    again = H.HashStore(tmp_path / "hashes.tsv")
    s2 = H.hash_corpus(idx, ALGORITHMS, "original", again)
    assert s2.total_new == 0 and s2.skipped == 100
    again.save()
    assert (tmp_path / "hashes.tsv").read_bytes() == before


def test_corrupt_file_is_recorded_and_skipped(tmp_path):
    root = make_corpus(tmp_path / "c", 5, size=(16, 16))
    (root / "broken.png").write_bytes(b"\x89PNG\r\n\x1a\n garbage")
    idx = H.ingest_corpus(root)
    store = H.HashStore(tmp_path / "hashes.tsv")
    s = H.hash_corpus(idx, ["phash"], "original", store)
    assert [f[0] for f in s.failures] == ["broken"]
    assert s.total_new == 5
    store.save()
    reloaded = H.HashStore(tmp_path / "hashes.tsv")
    assert reloaded.failed("broken", "original")
    assert H.hash_corpus(idx, ["phash"], "original", reloaded).total_new == 0


def test_hash_rejects_unknown_algorithm(tmp_path):
    idx = H.ingest_corpus(make_corpus(tmp_path, 2, size=(8, 8)))
    with pytest.raises(UnknownAlgorithm):
        H.hash_corpus(idx, ["neuralhash"], "original", H.HashStore())


def test_stored_hex_matches_direct_hash(hashed60, corpus60):
    idx, _, store = hashed60
    from phashbench.imageio import read_image
    img = read_image(corpus60 / "img007.png")
    for algo in ALGORITHMS:
        assert store.get("img007", "original", algo) == hash_image(algo, img)


def test_workers_match_serial(corpus60, hashed60):
    idx, m, serial = hashed60
    par = H.HashStore()
    H.hash_corpus(idx, ["phash", "colourhash"], "mirror", par, manifest=m, workers=3)
    for r in par.records():
        assert serial.get(r.image_id, r.variant, r.algo) == r.bithash()


# -- experiments -------------------------------------------------------------

def test_inter_counts_and_determinism(hashed60):
    idx, m, store = hashed60
    res = H.run_inter(store, idx, m)
    for algo in ALGORITHMS:
        assert res.counts[algo].n == 60 * 10
    assert H.run_inter(store, idx, m).counts == res.counts


def test_inter_matches_pairwise_oracle(hashed60):
    idx, m, store = hashed60
    from phashbench.metrics import hamming_count
    res = H.run_inter(store, idx, m, algorithms=["pdq"])
    ks = [hamming_count(store.get(a, "original", "pdq"), store.get(b, "original", "pdq"))
          for a, b in H.sample_pairs(idx, m.seed, m.k_neighbours)]
    assert res.counts["pdq"].counts.tolist() == np.bincount(ks, minlength=257).tolist()


def test_intra_identity_control_is_zero(hashed60):
    idx, m, store = hashed60
    res = H.run_intra(store, idx, m, "original")
    for st in res.stats().values():
        assert st.max == 0 and st.exact_match_frac == 1.0 and st.n == 60


def test_intra_permutation_invariant(hashed60, tmp_path):
    idx, m, store = hashed60
    res = H.run_intra(store, idx, m, "mirror")
    shuffled = H.HashStore()
    recs = list(store.records())
    np.random.default_rng(0).shuffle(recs)
    for r in recs:
        shuffled.add(r)
    assert H.run_intra(shuffled, idx, m, "mirror").counts == res.counts


def test_missing_hashes(hashed60):
    idx, m, store = hashed60
    with pytest.raises(MissingHashes, match="hash"):
        H.run_intra(store, idx, m, "scale")


def test_spill_file(hashed60, tmp_path):
    import gzip
    idx, m, store = hashed60
    H.run_intra(store, idx, m, "crop", spill=tmp_path / "pairs.csv.gz", algorithms=["phash"])
    rows = gzip.open(tmp_path / "pairs.csv.gz", "rt").read().splitlines()
    assert len(rows) == 60 and rows[0].startswith("img000,img000,phash,crop,")


# -- import / export ---------------------------------------------------------

def test_external_96_bit_import(hashed60, tmp_path):
    idx, m, store = hashed60
    rng = np.random.default_rng(1)
    path = tmp_path / "ext.tsv"
    recs = []
    for v in ("original", "mirror"):
        for i in idx.ids:
            val = int(rng.integers(0, 2 ** 63)) << 33 | int(rng.integers(0, 2 ** 33))
            recs.append(H.HashRecord(i, v, "neural96", 96, format(val, "024x")))
    H.write_store_file(path, recs)
    mixed = H.HashStore()
    for r in store.records():
        mixed.add(r)
    assert H.import_external_hashes(path, mixed) == 120
    res = H.run_intra(mixed, idx, m, "mirror", algorithms=["neural96"])
    assert res.counts["neural96"].length == 96 and res.counts["neural96"].n == 60
    assert H.import_external_hashes(path, mixed) == 0


def test_import_length_conflicts(tmp_path):
    path = tmp_path / "bad.tsv"
    H.write_store_file(path, [H.HashRecord("a", "original", "x", 96, "0" * 24),
                              H.HashRecord("b", "original", "x", 64, "0" * 16)])
    with pytest.raises(LengthInconsistency):
        H.read_store_file(path)
    H.write_store_file(path, [H.HashRecord("a", "original", "phash", 96, "0" * 24)])
    with pytest.raises(LengthInconsistency):
        H.read_store_file(path)


@pytest.mark.parametrize("text", ["", "id\tvariant\n", "image_id\tvariant\talgo\tbitlen\thex\na\toriginal\tx\t8\tzz\n",
                                  "image_id\tvariant\talgo\tbitlen\thex\na\toriginal\tx\t8\t123\n"])
def test_import_format_errors(tmp_path, text):
    path = tmp_path / "f.tsv"
    path.write_text(text)
    with pytest.raises(FormatError):
        H.read_store_file(path)


def test_store_export_import_roundtrip(hashed60, tmp_path):
    _, _, store = hashed60
    path = tmp_path / "out.tsv"
    H.write_store_file(path, store.records())
    back = H.HashStore()
    H.import_external_hashes(path, back)
    assert back.records() == store.records()


# -- manifest ----------------------------------------------------------------

def test_manifest_roundtrip(tmp_path):
    m = H.RunManifest(seed=3, k_neighbours=7, algorithms=["phash"], modifications=["thumb96", "crop"],
                      overrides={"crop": {"crop_frac": 0.1}})
    assert m.emulated == ["thumb96"]
    m.save(tmp_path / "m.json")
    back = H.RunManifest.load(tmp_path / "m.json")
    assert back == m and back.spec("crop").params["crop_frac"] == 0.1
    data = json.loads(m.to_json())
    assert data["notes"] == [H.IN_MEMORY_NOTE]
    with pytest.raises(UnknownAlgorithm):
        H.RunManifest(algorithms=["neuralhash"])

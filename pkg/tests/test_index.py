import math

import numpy as np
import pytest

from src.exceptions import (
    DimensionMismatchError,
    IndexEntryNotFoundError,
    ParseError,
    UnknownOwnerError,
)
from src.index.embedders import HashedBowEmbedder, build_embedder, fnv1a_64
from src.index.storage import dump_index, load_index
from src.index.vector_index import (
    EmbeddingIndex,
    VectorKind,
    cosine,
    index_remove,
    index_upsert,
    knn,
    node_representation,
)
from src.verbalizer.cache import VerbalizationMethod, VerbalizedWalk


def test_fnv1a_reference_values():
    assert fnv1a_64(b"") == 0xCBF29CE484222325
    assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C


def test_hashed_bow_is_unit_norm_and_deterministic():
    e = HashedBowEmbedder(64)
    vector = e.embed("Inception directed by Christopher Nolan.")
    assert vector.dtype == np.float32
    assert vector.shape == (64,)
    assert np.linalg.norm(vector) == pytest.approx(1.0, abs=1e-6)
    assert np.array_equal(vector, e.embed("Inception directed by Christopher Nolan."))


def test_hashed_bow_tokenization():
    e = HashedBowEmbedder()
    assert np.array_equal(e.embed("Hello, WORLD!"), e.embed("hello world"))
    assert np.array_equal(e.embed("snake_case"), e.embed("snake case"))
    assert not np.any(e.embed("...  --"))


def test_embedder_langchain_interface():
    e = HashedBowEmbedder(8)
    assert e.embed_query("x") == e.embed("x").tolist()
    assert len(e.embed_documents(["a", "b"])) == 2
    assert e.identifier == "hashed-bow-8"


def test_build_embedder_validation():
    assert isinstance(build_embedder("hashed-bow", 32), HashedBowEmbedder)
    with pytest.raises(ValueError):
        build_embedder("remote")
    with pytest.raises(ValueError):
        build_embedder("word2vec")


def test_cosine_examples():
    assert cosine(np.array([1.0, 0.0]), np.array([1.0, 1.0])) == pytest.approx(1 / math.sqrt(2))
    assert cosine(np.array([1.0, 0.0]), np.array([-1.0, 0.0])) == pytest.approx(-1.0)
    assert cosine(np.zeros(2), np.array([1.0, 1.0])) == 0.0
    with pytest.raises(DimensionMismatchError):
        cosine(np.ones(2), np.ones(3))


def test_node_representation_sorts_texts():
    e = HashedBowEmbedder(32)
    walks = [
        VerbalizedWalk("k2", "b text", VerbalizationMethod.TEMPLATE),
        VerbalizedWalk("k1", "a text", VerbalizationMethod.TEMPLATE),
    ]
    assert np.array_equal(node_representation("n", walks, e), e.embed("a text\nb text"))
    assert not np.any(node_representation("n", [], e))


def test_upsert_and_remove():
    idx = EmbeddingIndex(2)
    idx.upsert("a", np.array([1.0, 0.0]), VectorKind.NODE)
    idx.upsert("w1", np.array([0.0, 1.0]), VectorKind.WALK, owner="a")
    assert len(idx) == 2
    assert idx.walks_of("a") == {"w1"}
    with pytest.raises(UnknownOwnerError):
        idx.upsert("w2", np.array([0.0, 1.0]), VectorKind.WALK, owner="zzz")
    with pytest.raises(DimensionMismatchError):
        idx.upsert("b", np.ones(3), VectorKind.NODE)
    idx.remove("a")
    assert len(idx) == 0
    with pytest.raises(IndexEntryNotFoundError):
        idx.remove("a")


def test_upsert_replaces_and_stored_vectors_are_read_only():
    idx = EmbeddingIndex(2)
    source = np.array([1.0, 0.0])
    index_upsert(idx, "a", source, VectorKind.NODE)
    source[0] = 5.0
    assert idx.node_vectors["a"][0] == 1.0
    with pytest.raises(ValueError):
        idx.node_vectors["a"][0] = 2.0
    index_upsert(idx, "a", np.array([0.0, 1.0]), VectorKind.NODE)
    assert idx.node_vectors["a"][1] == 1.0
    index_remove(idx, "a")
    assert not idx.node_vectors


def test_walk_removal_keeps_owner():
    idx = EmbeddingIndex(2)
    idx.upsert("a", np.array([1.0, 0.0]), VectorKind.NODE)
    idx.upsert("w", np.array([1.0, 1.0]), VectorKind.WALK, owner="a")
    idx.remove("w", VectorKind.WALK)
    assert "a" in idx.node_vectors
    assert idx.walks_of("a") == set()


def test_knn_ties_break_on_id():
    idx = EmbeddingIndex(2)
    for node in ("b", "a", "c"):
        idx.upsert(node, np.array([1.0, 0.0]), VectorKind.NODE)
    assert [node for node, _ in knn(idx, np.array([1.0, 0.0]), 2, VectorKind.NODE)] == ["a", "b"]


def test_knn_with_owner_filter():
    idx = EmbeddingIndex(2)
    idx.upsert("a", np.array([1.0, 0.0]), VectorKind.NODE)
    idx.upsert("b", np.array([0.0, 1.0]), VectorKind.NODE)
    idx.upsert("wa", np.array([0.0, 1.0]), VectorKind.WALK, owner="a")
    idx.upsert("wb", np.array([0.0, 1.0]), VectorKind.WALK, owner="b")
    assert [key for key, _ in idx.knn(np.array([0.0, 1.0]), 5, VectorKind.WALK, owner="a")] == [
        "wa"
    ]
    assert len(idx.knn(np.array([0.0, 1.0]), 5, VectorKind.WALK)) == 2
    with pytest.raises(ValueError):
        idx.knn(np.array([0.0, 1.0]), 0, VectorKind.NODE)


def test_knn_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(20):
        idx = EmbeddingIndex(8)
        vectors = rng.normal(size=(30, 8)).astype(np.float32)
        for i, vector in enumerate(vectors):
            idx.upsert(f"n{i:02d}", vector, VectorKind.NODE)
        query = rng.normal(size=8).astype(np.float32)
        k = int(rng.integers(1, 10))
        q = query.astype(np.float64)
        wide = vectors.astype(np.float64)
        sims = [float(v @ q / (np.linalg.norm(v) * np.linalg.norm(q))) for v in wide]
        expected = sorted(range(30), key=lambda i: (-sims[i], i))[:k]
        result = idx.knn(query, k, VectorKind.NODE)
        assert [node for node, _ in result] == [f"n{i:02d}" for i in expected]
        assert [sim for _, sim in result] == pytest.approx([sims[i] for i in expected])


def _sample_index() -> EmbeddingIndex:
    e = HashedBowEmbedder(16)
    idx = EmbeddingIndex(16, e.identifier)
    idx.upsert("Jaws", e.embed("Jaws directed by Steven Spielberg."), VectorKind.NODE)
    idx.upsert("Kéré", e.embed("unicode node"), VectorKind.NODE)
    idx.upsert(
        '["Jaws","directedBy","Steven Spielberg"]',
        e.embed("Jaws directed by Steven Spielberg."),
        VectorKind.WALK,
        owner="Jaws",
    )
    return idx


def test_storage_round_trip_is_bit_exact():
    idx = _sample_index()
    data = dump_index(idx)
    loaded = load_index(data)
    assert loaded == idx
    assert loaded.embedder_id == "hashed-bow-16"
    assert dump_index(loaded) == data


def test_storage_is_independent_of_insertion_order():
    e = HashedBowEmbedder(4)
    first, second = EmbeddingIndex(4), EmbeddingIndex(4)
    for node in ("x", "y"):
        first.upsert(node, e.embed(node), VectorKind.NODE)
    for node in ("y", "x"):
        second.upsert(node, e.embed(node), VectorKind.NODE)
    assert dump_index(first) == dump_index(second)


@pytest.mark.parametrize("cut", [1, 5, 20])
def test_storage_rejects_truncation(cut):
    data = dump_index(_sample_index())
    with pytest.raises(ParseError):
        load_index(data[:-cut])


def test_storage_rejects_trailing_bytes_and_bad_header():
    data = dump_index(_sample_index())
    with pytest.raises(ParseError):
        load_index(data + b"\x00")
    with pytest.raises(ParseError):
        load_index(b'{"format": "other", "dimension": 2, "count": 0}\n')
    with pytest.raises(ParseError):
        load_index(b"no header")

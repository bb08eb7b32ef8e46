import numpy as np
import pytest

from signedwhole.data import GeneratorConfig, generate_planted
from signedwhole.methods import METHODS, canonical_method, embed, family


@pytest.fixture(scope="module")
def small():
    return generate_planted(GeneratorConfig(n_graphs=8, n_min=8, n_max=14, seed=21))


def test_aliases():
    assert canonical_method("wsgcn+-") == "wsgcn±"
    assert family("sine-average") == "sine"
    with pytest.raises(KeyError):
        canonical_method("deepwalk")


@pytest.mark.parametrize("method", METHODS)
def test_permutation_moves_rows(small, method):
    kw = dict(depth=2, d=6, epochs=2, seed=5)
    a = embed(small, method, **kw).embedding
    perm = np.random.default_rng(1).permutation(len(small))
    b = embed(small.subset(perm), method, **kw).embedding
    assert b.ids == [a.ids[i] for i in perm]
    np.testing.assert_allclose(b.vectors, a.vectors[perm], rtol=0, atol=1e-12)


def test_same_seed_bit_identical(small):
    for m in ("sg2vn", "sine-sum", "wsgcn-gb"):
        a = embed(small, m, depth=2, d=6, epochs=2, seed=0).embedding.vectors
        b = embed(small, m, depth=2, d=6, epochs=2, seed=0).embedding.vectors
        assert np.array_equal(a, b)


def test_wsgcn_metadata(small):
    res = embed(small, "wsgcn-gb", depth=1, d=4, epochs=1)
    assert [m["graph_id"] for m in res.graph_meta] == small.ids
    assert all(m["partition_solver"] in ("exact", "local") for m in res.graph_meta)


def test_threads_match_serial(small):
    a = embed(small, "wsgcn-sb", depth=1, d=4, epochs=2, threads=1).embedding.vectors
    b = embed(small, "wsgcn-sb", depth=1, d=4, epochs=2, threads=2).embedding.vectors
    np.testing.assert_array_equal(a, b)

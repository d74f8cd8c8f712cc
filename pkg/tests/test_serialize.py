import os

import numpy as np
import pytest

from permprod.serialize import (
    load_json,
    matrix_from_dict,
    matrix_to_dict,
    model_from_dict,
    model_to_dict,
    multipartition_from_dict,
    permutation_from_dict,
    permutation_to_dict,
    load_test_graph,
)
from permprod.strings import build_string_assignment, validate_assignment
from permprod.tensor import Permutation, StructuredMatrix

FIXTURE = os.path.join(os.path.dirname(__file__), "..", "fixtures", "appendix_a.json")


def test_model_roundtrip():
    d = {"colors": ["a", "b"], "edges": [["a", "b"]]}
    g, a = model_from_dict(d)
    assert a is None
    a = build_string_assignment(g)
    d2 = model_to_dict(g, a)
    g2, a2 = model_from_dict(d2)
    assert g2 == g and a2 == a


def test_matrix_roundtrip_dense_and_permutation():
    m = StructuredMatrix.dense(["s"], 2, np.array([[1, 2], [3, 4]], dtype=np.int64))
    back = matrix_from_dict(matrix_to_dict(m))
    assert np.array_equal(back.entries, m.entries)
    assert back.entries.dtype == np.int64

    c = StructuredMatrix.dense(["s"], 2, np.array([[0.5, 1j], [0, 1]]))
    back = matrix_from_dict(matrix_to_dict(c))
    assert np.allclose(back.entries, c.entries)

    p = StructuredMatrix.from_permutation(["s"], 3, Permutation((1, 2, 0)))
    back = matrix_from_dict(matrix_to_dict(p))
    assert back.perm == p.perm


def test_permutation_roundtrip():
    p = Permutation((2, 0, 1))
    assert permutation_from_dict(permutation_to_dict(p)) == p
    with pytest.raises(ValueError):
        permutation_from_dict({"n": 2, "images": [0, 1, 2]})


def test_bundled_fixture_loads_and_validates():
    data = load_json(FIXTURE)
    t = load_test_graph(data, 2, seed=0)
    ok, violations = validate_assignment(*model_from_dict(data))
    assert ok, violations
    assert t.digraph.vertex_count == 6
    assert t.digraph.edge_count == 8
    assert t.edge_colors == ("R", "G", "B", "B", "G", "G", "G", "B")
    # labels live on each color's strings
    assert t.labels[0].support == ("3",)
    assert t.labels[2].support == ("1", "2")
    # deterministic: same seed, same labels
    t2 = load_test_graph(data, 2, seed=0)
    for a, b in zip(t.labels, t2.labels):
        assert np.array_equal(a.entries, b.entries)


def test_fixture_matches_programmatic_example():
    from helpers import example_test_graph

    data = load_json(FIXTURE)
    t = load_test_graph(data, 2, seed=0)
    t2 = example_test_graph(n=2)
    assert t.digraph == t2.digraph
    assert t.edge_colors == t2.edge_colors
    assert t.assignment == t2.assignment


def test_multipartition_from_dict():
    mp = multipartition_from_dict({"1": [[0, 1], [2]], "2": [[0], [1], [2]]}, 3)
    assert mp.part("1").blocks == ((0, 1), (2,))
    assert mp.part("2").num_blocks == 3

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdneat.plants import (
    Dataset, DatasetError, ExcitationSpec, default_datasets, generate_excitation, load_dataset,
    load_input, normalize, save_dataset, save_input, simulate_exemplary,
)


def recursion_oracle(u):
    x = {}
    past = lambda k: x.get(k, 0.0)
    drive = lambda k: u[k] if k >= 0 else 0.0
    for k in range(len(u)):
        x[k] = -0.05 * past(k - 1) + 0.02 * past(k - 5) + math.sin(past(k - 10) / 10) + drive(k - 15)
    return [x[k] for k in range(len(u))]


def test_zero_input_gives_zero_output():
    assert not simulate_exemplary(np.zeros(100)).any()


def test_unit_step_response():
    x = simulate_exemplary(np.ones(30))
    assert not x[:15].any()
    assert x[15] == 1.0
    assert x[16] == 0.95
    assert x[17] == 0.9525


def test_random_input_matches_oracle():
    u = np.random.default_rng(7).uniform(-1, 1, 100)
    assert simulate_exemplary(u).tolist() == recursion_oracle(list(u))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=80), st.integers(1, 80))
def test_causal(u, m):
    full = simulate_exemplary(u)
    assert simulate_exemplary(u[:m]).tolist() == full[:m].tolist()


@given(st.integers(0, 60), st.integers(61, 120))
def test_step_delay_signature(k0, n):
    u = np.zeros(n)
    u[k0:] = 1.0
    x = simulate_exemplary(u)
    assert not x[:k0 + 15].any()
    if k0 + 15 < n:
        assert x[k0 + 15] == 1.0


@pytest.mark.parametrize("x,expected", [(30.0, 1.0), (0.0, 0.0), (-15.0, -0.5)])
def test_normalize(x, expected):
    assert normalize([x])[0] == expected


@given(st.lists(st.floats(-1e6, 1e6), max_size=50))
def test_normalize_undoes_scaling(xs):
    np.testing.assert_allclose(normalize(np.array(xs) * 30), xs, rtol=1e-15)


def test_excitation_constant_range():
    u = generate_excitation(ExcitationSpec(length=37, hold=5, lo=0.4, hi=0.4))
    assert (u == 0.4).all() and len(u) == 37


def test_excitation_segments():
    u = generate_excitation(ExcitationSpec(length=10, hold=5, lo=-1, hi=1, seed=3))
    assert len(set(u[:5])) == 1 and len(set(u[5:])) == 1 and u[0] != u[5]


def test_excitation_seeded():
    spec = ExcitationSpec(length=200, hold=7, lo=-2, hi=3, seed=11)
    a, b = generate_excitation(spec), generate_excitation(spec)
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() == generate_excitation(spec, random.Random(11)).tobytes()
    assert -2 <= a.min() and a.max() <= 3


def test_invalid_excitation_spec():
    with pytest.raises(ValueError):
        ExcitationSpec(length=10, hold=0)
    with pytest.raises(ValueError):
        ExcitationSpec(length=10, hold=2, lo=1, hi=0)


def test_default_datasets():
    learning, verify = default_datasets()
    assert learning.n == 1000 and [v.n for v in verify] == [1000, 1000]
    np.testing.assert_array_equal(learning.t, normalize(simulate_exemplary(learning.u)))


# -- CSV -----------------------------------------------------------------------

def test_load_three_rows(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("k,u,t\n0,1.0,0.5\n1,-2,0\n2,3e-1,1e2\n")
    ds = load_dataset(path)
    assert ds.n == 3
    assert ds.u.tolist() == [1.0, -2.0, 0.3] and ds.t.tolist() == [0.5, 0.0, 100.0]


def test_round_trip_bit_equal(tmp_path):
    rng = np.random.default_rng(5)
    ds = Dataset(rng.normal(size=1000) * 1e-3, rng.normal(size=1000) * 1e5)
    save_dataset(ds, tmp_path / "d.csv")
    back = load_dataset(tmp_path / "d.csv")
    assert back.u.tobytes() == ds.u.tobytes() and back.t.tobytes() == ds.t.tobytes()


def test_saved_file_layout(tmp_path):
    save_dataset(Dataset([0.5, 1.0], [0.25, 2.0]), tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_bytes() == b"k,u,t\n0,0.5,0.25\n1,1,2\n"


@pytest.mark.parametrize("body,message", [
    ("k,u,t\n0,1.0,0.5\n1,abc,0.2\n", "line 3: column 'u' value 'abc' is not a number"),
    ("k,u,t\n0,1.0,0.5\n1,2.0\n", "line 3: expected 3 columns, got 2"),
    ("k,u,t\n0,1.0,nan\n", "line 2: column 't' value 'nan' is not finite"),
    ("k,u,t\n0,1.0,0.5\n2,1.0,0.5\n", "line 3: sample index 2 breaks contiguity"),
    ("k,x,t\n0,1.0,0.5\n", "line 1: expected header k,u,t"),
    ("k,u,t\n", "no samples"),
    ("", "empty file"),
])
def test_load_errors(tmp_path, body, message):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(DatasetError, match=message):
        load_dataset(path)


def test_missing_file(tmp_path):
    with pytest.raises(DatasetError, match="not found"):
        load_dataset(tmp_path / "nope.csv")


def test_load_input_accepts_both_layouts(tmp_path):
    save_input([0.1, 0.2], tmp_path / "u.csv")
    save_dataset(Dataset([0.1, 0.2], [0.0, 0.0]), tmp_path / "d.csv")
    assert load_input(tmp_path / "u.csv").tolist() == load_input(tmp_path / "d.csv").tolist() == [0.1, 0.2]


def test_dataset_rejects_bad_values():
    with pytest.raises(DatasetError):
        Dataset([1.0, 2.0], [1.0])
    with pytest.raises(DatasetError):
        Dataset([], [])
    with pytest.raises(DatasetError):
        Dataset([np.inf], [0.0])

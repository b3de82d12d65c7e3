import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pxbar.ann import (
    LayerMapping,
    activation_apply,
    conductances_to_weights,
    float_forward,
    forward,
    map_layer,
    read_weights_csv,
    weights_to_conductances,
    write_weights_csv,
)
from pxbar.device import DeviceParams
from pxbar.energy import Trace, energy_report
from pxbar.errors import DegenerateWeightsWarning, DimensionError, SaturationWarning, SchemaError
from pxbar.toydata import MLP_ACTIVATIONS, accuracy, make_blobs, train_mlp, with_bias

UNIT = DeviceParams("PCM", 1.0, 2.0, 100e-9, 1e-6, 101e-6)


def test_zero_and_full_scale_weights(pcm_params):
    w = np.array([[0.0, 2.0], [-2.0, 1.0]])
    g_pos, g_neg, s_w = weights_to_conductances(w, pcm_params)
    assert s_w == (pcm_params.g_c - pcm_params.g_a) / 2.0
    assert g_pos[0, 0] == g_neg[0, 0] == pcm_params.g_a
    assert g_pos[0, 1] == pcm_params.g_c and g_neg[0, 1] == pcm_params.g_a
    assert g_neg[1, 0] == pcm_params.g_c and g_pos[1, 0] == pcm_params.g_a


def test_negative_half_scale_example():
    w = np.array([[1.0, -0.5]])
    g_pos, g_neg, _ = weights_to_conductances(w, UNIT)
    assert g_pos[0, 1] == pytest.approx(1e-6, rel=1e-12)
    assert g_neg[0, 1] == pytest.approx(51e-6, rel=1e-12)


def test_degenerate_weights_warn(pcm_params):
    with pytest.warns(DegenerateWeightsWarning):
        g_pos, g_neg, s_w = weights_to_conductances(np.zeros((2, 2)), pcm_params, fallback_scale=1e-5)
    assert s_w == 1e-5
    assert np.all(g_pos == pcm_params.g_a) and np.all(g_neg == pcm_params.g_a)


def test_balanced_pair_reads_zero():
    g = np.full((2, 3), 4e-5)
    assert np.all(conductances_to_weights(g, g, 1e-5) == 0.0)


finite_weights = arrays(
    float, st.tuples(st.integers(1, 5), st.integers(1, 5)),
    elements=st.floats(-10, 10, allow_nan=False, allow_subnormal=False),
)


@given(w=finite_weights)
def test_mapping_round_trip(w):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateWeightsWarning)
        g_pos, g_neg, s_w = weights_to_conductances(w, UNIT)
    w_hat = conductances_to_weights(g_pos, g_neg, s_w)
    scale = max(1.0, np.max(np.abs(w)))
    assert np.max(np.abs(w_hat - w)) <= 1e-12 * scale


@given(w=finite_weights)
def test_one_sided_encoding(w):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateWeightsWarning)
        g_pos, g_neg, _ = weights_to_conductances(w, UNIT)
    pos_raised = g_pos != UNIT.g_a
    neg_raised = g_neg != UNIT.g_a
    assert not np.any(pos_raised & neg_raised)
    assert np.all(pos_raised | neg_raised | (w == 0) | (np.abs(w) * 1e17 < np.max(np.abs(w))))


def test_programmed_mapping_error_bound(make_array, pcm_params, rng):
    w = rng.normal(size=(4, 3))
    layer = map_layer(w, make_array, program_tol=0.01)
    err = np.max(np.abs(layer.read_back_weights() - w))
    floor = 0.01 * pcm_params.g_a / layer.scale
    assert err <= 0.01 * pcm_params.g_c / layer.scale + floor


@pytest.mark.parametrize(
    "kind, z, expected",
    [("relu", -1.0, 0.0), ("relu", 2.0, 2.0), ("none", -3.0, -3.0), ("sigmoid", 0.0, 0.5),
     ("tanh", 1.0, 0.7615941559557649)],
)
def test_activation(kind, z, expected):
    assert activation_apply(kind, z) == pytest.approx(expected, rel=1e-15)


def test_activation_unknown():
    with pytest.raises(ValueError):
        activation_apply("gelu", 0.0)


def test_identity_layer(make_array, rng):
    layer = map_layer(np.eye(4), make_array)
    x = rng.normal(size=4)
    assert forward([layer], x) == pytest.approx(x, rel=1e-9)


@pytest.mark.parametrize("act, value", [("none", 0.0), ("sigmoid", 0.5), ("relu", 0.0)])
def test_zero_weights(make_array, act, value):
    with pytest.warns(DegenerateWeightsWarning):
        layer = map_layer(np.zeros((3, 2)), make_array, act)
    out = forward([layer], np.array([0.1, -0.4, 0.3]))
    assert out == pytest.approx([value, value], abs=1e-15)


def test_two_layer_net_matches_float_oracle(make_array, rng):
    for _ in range(5):
        ws = [rng.normal(size=(3, 6)), rng.normal(size=(6, 4))]
        acts = ["tanh", "sigmoid"]
        mappings = [map_layer(w, make_array, a) for w, a in zip(ws, acts)]
        x = rng.normal(size=(10, 3))
        ref = float_forward(ws, acts, x)
        assert forward(mappings, x) == pytest.approx(ref, rel=1e-6, abs=1e-12)


def test_forward_dimension_error(make_array):
    layer = map_layer(np.eye(3), make_array)
    with pytest.raises(DimensionError):
        forward([layer], np.ones(4))


def test_layer_mapping_validation(make_array):
    with pytest.raises(DimensionError):
        LayerMapping(np.ones((2, 2)), 1e-5, make_array(2, 3), make_array(2, 2))
    with pytest.raises(ValueError):
        LayerMapping(np.ones((2, 2)), 0.0, make_array(2, 2), make_array(2, 2))


def test_fixed_scale_saturation_warns(make_array):
    layer = map_layer(np.eye(2), make_array)
    with pytest.warns(SaturationWarning):
        out = forward([layer], np.array([1.0, 0.5]), v_read=0.2, v_scale=0.4)
    # 1.0 clips to v_read, i.e. 0.5 input units
    assert out == pytest.approx([0.5, 0.5], rel=1e-9)


def test_fixed_scale_in_range_is_silent(make_array):
    layer = map_layer(np.eye(2), make_array)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        out = forward([layer], np.array([0.5, -0.25]), v_read=0.2, v_scale=0.4)
    assert out == pytest.approx([0.5, -0.25], rel=1e-9)


def test_two_phase_reads_are_traced(make_array):
    layer = map_layer(np.eye(3), make_array)
    trace = Trace()
    forward([layer], np.ones((5, 3)), trace=trace)
    # 2 arrays x 2 phases x 5 samples
    assert len(trace.reads) == 20
    assert energy_report(trace).mac_count == 20 * 9


def test_nonideal_forward_close_to_ideal(make_array, rng):
    w = rng.normal(size=(4, 3))

    def wired(rows, cols):
        return make_array(rows, cols, 1.0, 1.0)

    ideal = forward([map_layer(w, make_array)], rng.normal(size=4))
    x = rng.normal(size=4)
    a = forward([map_layer(w, make_array)], x)
    b = forward([map_layer(w, wired)], x, mode="nonideal")
    assert np.max(np.abs(a - b)) < 1e-2 * np.max(np.abs(a))
    assert ideal.shape == (3,)


def test_weights_csv_round_trip(tmp_path, rng):
    w = rng.normal(size=(3, 5))
    p = tmp_path / "w.csv"
    write_weights_csv(p, w, "tanh")
    got, act = read_weights_csv(p)
    assert act == "tanh"
    assert got == pytest.approx(w, rel=1e-11)
    assert p.read_text().splitlines()[:2] == ["# rows,cols,activation", "# 3,5,tanh"]


@pytest.mark.parametrize(
    "body, match",
    [
        ("1,2\n3,4\n", "header"),
        ("# rows,cols,activation\n# 2,2,none\n1,2\n3\n", ":4:"),
        ("# rows,cols,activation\n# 2,2,none\n1,2\n", "rows"),
        ("# rows,cols,activation\n# 1,2,swish\n1,2\n", "activation"),
        ("# rows,cols,activation\n# 1,2,none\n1,x\n", ":3:"),
    ],
)
def test_weights_csv_schema_errors(tmp_path, body, match):
    p = tmp_path / "w.csv"
    p.write_text(body)
    with pytest.raises(SchemaError, match=match):
        read_weights_csv(p)


# ------------------------------------------------------------------ toy net


@pytest.fixture(scope="module")
def toy():
    x_train, y_train = make_blobs(600, seed=0)
    x_test, y_test = make_blobs(300, seed=1)
    weights = train_mlp(with_bias(x_train), y_train, seed=0)
    return weights, with_bias(x_test), y_test


def test_toy_net_learns(toy):
    weights, x, y = toy
    assert accuracy(float_forward(weights, MLP_ACTIVATIONS, x), y) > 0.9


def test_toy_net_ideal_equals_float(toy, make_array):
    weights, x, y = toy
    mappings = [map_layer(w, make_array, a) for w, a in zip(weights, MLP_ACTIVATIONS)]
    out = forward(mappings, x)
    ref = float_forward(weights, MLP_ACTIVATIONS, x)
    assert out == pytest.approx(ref, rel=1e-6, abs=1e-9)
    assert accuracy(out, y) == accuracy(ref, y)


def test_blobs_are_seeded():
    a, la = make_blobs(30, seed=5)
    b, lb = make_blobs(30, seed=5)
    assert np.array_equal(a, b) and np.array_equal(la, lb)
    assert not np.array_equal(a, make_blobs(30, seed=6)[0])
    assert list(la[:6]) == [0, 1, 2, 0, 1, 2]


def test_tolerance_sweep_logged(toy, make_array, capsys):
    weights, x, y = toy
    ref = accuracy(float_forward(weights, MLP_ACTIVATIONS, x), y)
    results = {}
    for tol in (0.001, 0.01, 0.1):
        mappings = [map_layer(w, make_array, a, program_tol=tol) for w, a in zip(weights, MLP_ACTIVATIONS)]
        results[tol] = accuracy(forward(mappings, x), y)
    with capsys.disabled():
        print("\ntolerance sweep (float %.4f): " % ref + ", ".join(f"{t:g}->{a:.4f}" for t, a in results.items()))
    # quantization noise may shuffle accuracy by a few samples either way;
    # what must hold is that no tolerance in the sweep costs more than 5 pp
    assert all(ref - a <= 0.05 for a in results.values())
    assert not math.isnan(sum(results.values()))

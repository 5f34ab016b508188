# Copyright 2026 The guesswork-lab Authors
# SPDX-License-Identifier: Apache-2.0
import math

import pytest

import gwlab


def test_entropy_and_divergence():
    assert gwlab.binary_entropy(0.5) == 1.0
    assert gwlab.kl_divergence(0.3, 0.3) == 0.0
    assert gwlab.binary_entropy(0.11) == pytest.approx(0.4999157, abs=1e-6)


def test_rates_have_units_and_regions():
    reps = gwlab.rates(0.8, 0.5)
    by_name = {r["scenario"]: r for r in reps}
    assert by_name["offline-allocated"]["rate"] == pytest.approx(0.2781, abs=5e-5)
    assert all(r["units"] == "bits_per_m" for r in reps)


def test_table1_cells():
    cells = gwlab.table1()
    assert len(cells) == 12
    assert all(c["ok"] for c in cells)


def test_keysize_roundtrip():
    rows = gwlab.keysize([2.0])
    assert rows[0]["p0"] == pytest.approx(0.0669873, abs=1e-6)
    assert rows[0]["ratio"] == 2.0


def test_simulate_deterministic():
    a = gwlab.simulate("no-allocation-keyed", m=6, p=0.3, trials=200)
    b = gwlab.simulate("no-allocation-keyed", m=6, p=0.3, trials=200, workers=1)
    assert a == b
    assert a["estimate"]["units"] == "guesses"
    assert 0.5 < a["rate"]["value"] < 1.5


def test_sweep_broken_hash_exact():
    r = gwlab.sweep("broken-hash", [8, 9, 10], p=0.25, trials=100)
    assert math.isfinite(r["fitted_rate"])


def test_keyed_model_and_attack():
    h = gwlab.KeyedHashModel(4, 12, 0.3, 7)
    label = h.eval(5)
    assert len(label) == 4
    guesses, ok = gwlab.online_attack(h, label)
    assert ok and 1 <= guesses <= 6


def test_validation_errors():
    with pytest.raises(ValueError):
        gwlab.simulate("allocated-online", p=0.7)
    with pytest.raises(ValueError):
        gwlab.simulate("no-such-mode")

# Copyright 2026 The guesswork-lab Authors
# SPDX-License-Identifier: Apache-2.0
"""Guesswork of keyed, biased hash functions: closed-form rates and Monte
Carlo experiments backed by the C++ core."""

import json as _json

from . import _core
from ._core import (
    DEFAULT_SEED,
    SCHEMA,
    ConfigError,
    DomainError,
    KeyedHashModel,
    RangeError,
    ResourceError,
    binary_entropy,
    expected_guesses_per_bin,
    kl_divergence,
    online_attack,
    renyi_entropy_bernoulli,
    solve_bias_for_alpha,
    users_for_s,
)

__all__ = [
    "DEFAULT_SEED",
    "SCHEMA",
    "ConfigError",
    "DomainError",
    "KeyedHashModel",
    "RangeError",
    "ResourceError",
    "binary_entropy",
    "expected_guesses_per_bin",
    "keysize",
    "kl_divergence",
    "online_attack",
    "rates",
    "renyi_entropy_bernoulli",
    "simulate",
    "solve_bias_for_alpha",
    "sweep",
    "table1",
    "users_for_s",
]


def rates(s, p, m=8, n=0, theta=None):
    """Closed-form rates (bits per m) for every applicable scenario."""
    return _json.loads(_core.rates_json(s, p, m, n, theta))


def table1():
    """Recomputed rate table cells with published values and deltas."""
    return _json.loads(_core.table1_json())


def keysize(alphas=(1.0, 1.25, 1.5, 2.0, 3.0)):
    return _json.loads(_core.keysize_json(list(alphas)))


def simulate(mode, **kwargs):
    """Mean guesswork at one m. Keyword arguments mirror the CLI flags."""
    return _json.loads(_core.simulate_json(mode, **kwargs))


def sweep(mode, m_sweep, **kwargs):
    """Fitted rate of log2 E(G) against m."""
    return _json.loads(_core.sweep_json(mode, m_sweep=list(m_sweep), **kwargs))

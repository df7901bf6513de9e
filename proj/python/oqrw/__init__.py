"""Homogeneous open quantum random walks: structure, asymptotics and simulation."""

import json

from ._core import Model, OqrwError, State, absorption, rate, simulate, w1
from . import _core

__all__ = [
    "Model",
    "OqrwError",
    "State",
    "absorption",
    "analyze",
    "clt",
    "rate",
    "simulate",
    "w1",
]


def analyze(model, state=None):
    """Decomposition report: recurrent/transient split, blocks, absorption operators."""
    return json.loads(_core.analyze(model, state))


def clt(model, state, horizon):
    """Gaussian-mixture prediction for (X_n - X_0)/sqrt(n) at the given horizon."""
    return json.loads(_core.clt(model, state, horizon))

"""Exhaustive hyperparameter grid search scored by validation accuracy."""

from __future__ import annotations

from itertools import product

import numpy as np

from ..errors import ParameterError


def expand_grid(param_grid: dict) -> list[dict]:
    """All combinations, first key varying slowest (insertion-order grid)."""
    if not param_grid:
        raise ParameterError("param_grid must name at least one parameter")
    keys = list(param_grid)
    for key in keys:
        if not param_grid[key]:
            raise ParameterError(f"param_grid[{key!r}] has no candidate values")
    return [dict(zip(keys, combo))
            for combo in product(*(param_grid[k] for k in keys))]


def grid_search(kind: str, param_grid: dict, X_train, y_train, X_valid,
                y_valid) -> tuple[dict, list[tuple[dict, float]]]:
    """Fit every grid point, score on the validation split.

    Returns (best_params, table); the table has one (params, accuracy) row
    per grid point in grid order, and ties keep the earliest row.
    """
    from . import make_classifier

    y_valid = np.asarray(y_valid)
    table = []
    best_params, best_acc = None, -1.0
    for params in expand_grid(param_grid):
        clf = make_classifier(kind, **params).fit(X_train, y_train)
        acc = float(np.mean(clf.predict(X_valid) == y_valid))
        table.append((params, acc))
        if acc > best_acc:
            best_params, best_acc = params, acc
    return best_params, table

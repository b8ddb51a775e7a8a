"""Minimal estimator plumbing.

Hyperparameters are the __init__ arguments, stored verbatim; fitted state
lives in trailing-underscore attributes. ``get_params``/``set_params`` follow
the scikit-learn contract so estimators compose with ecosystem tooling
(pipelines, cloning, grid search) without depending on it.
"""

from __future__ import annotations

import inspect

import numpy as np

from .errors import ParameterError


class Estimator:
    """Base class providing get_params/set_params over __init__ arguments."""

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "Estimator":
        valid = self._param_names()
        for key, value in params.items():
            if key not in valid:
                raise ParameterError(
                    f"unknown parameter {key!r} for {type(self).__name__}; "
                    f"valid parameters: {valid}"
                )
            setattr(self, key, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


class TransformerMixin:
    """fit is a no-op for stateless transformers; adds fit_transform."""

    def fit(self, X, y=None):
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)


class ClassifierMixin:
    """Adds accuracy scoring on top of predict."""

    def score(self, X, y) -> float:
        y = np.asarray(y)
        return float(np.mean(self.predict(X) == y))

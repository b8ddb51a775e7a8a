"""Benchmark run configuration and its flat key-value file format.

The file grammar is one ``dotted.key = value`` pair per line; ``#`` starts
a comment, blank lines are skipped. Values are coerced to bool/int/float
when they parse as one, and comma-separated values form a list. Example::

    dataset.synthetic = glyphs
    dataset.samples = 2000
    features = hog, lbp, gabor
    classifiers = svm, rf
    classifier.svm.C = 10
    split.seed = 0
    jobs = 2

Unknown keys are rejected so typos fail loudly instead of silently running
a default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classify import KINDS
from .datasets import LABEL_FIRST, SCHEMAS, SplitSpec
from .errors import ParameterError, ParseError
from .features import METHODS

SYNTHETIC_SETS = ("glyphs", "squares")

_TOP_KEYS = ("features", "classifiers", "jobs", "raw_baseline")
_SECTIONS = ("dataset", "preprocess", "split", "feature", "classifier",
             "output")
_DATASET_KEYS = ("path", "test_path", "schema", "side", "synthetic",
                 "samples")
_PREPROCESS_KEYS = ("target_side", "gaussian_sigma", "deskew")
_SPLIT_KEYS = ("train_fraction", "seed", "stratified")
_OUTPUT_KEYS = ("dir", "cache_dir")


@dataclass
class RunConfig:
    """Everything one benchmark run needs, resolvable before any work."""

    dataset_path: str | None = None
    test_path: str | None = None
    schema: str = LABEL_FIRST
    side: int = 28
    synthetic: str | None = None
    samples: int = 2000
    preprocess: dict = field(default_factory=dict)
    features: list = field(default_factory=lambda: [("hog", {}), ("lbp", {}),
                                                    ("gabor", {})])
    classifiers: list = field(default_factory=lambda: [(k, {}) for k in KINDS])
    split: SplitSpec = field(default_factory=SplitSpec)
    out_dir: str = "out"
    cache_dir: str | None = None
    jobs: int = 1
    raw_baseline: bool = False

    def validate(self) -> "RunConfig":
        if not self.features:
            raise ParameterError("config lists no feature methods")
        if not self.classifiers:
            raise ParameterError("config lists no classifiers")
        for method, _ in self.features:
            if method not in METHODS:
                raise ParameterError(
                    f"unknown feature method {method!r}, expected one of "
                    f"{METHODS}")
        for kind, _ in self.classifiers:
            if kind not in KINDS:
                raise ParameterError(
                    f"unknown classifier kind {kind!r}, expected one of "
                    f"{KINDS}")
        if self.schema not in SCHEMAS:
            raise ParameterError(
                f"schema must be one of {SCHEMAS}, got {self.schema!r}")
        if self.synthetic is not None and self.synthetic not in SYNTHETIC_SETS:
            raise ParameterError(
                f"synthetic set must be one of {SYNTHETIC_SETS}, "
                f"got {self.synthetic!r}")
        if self.dataset_path is None and self.synthetic is None:
            raise ParameterError(
                "config needs either a dataset path or a synthetic set")
        if int(self.jobs) < 1:
            raise ParameterError(f"jobs must be >= 1, got {self.jobs}")
        return self


def coerce_scalar(text: str):
    """bool/int/float when the token reads as one, else the bare string."""
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_config_text(text: str) -> dict:
    """Flat dotted-key mapping from config file text."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ParseError(f"line {lineno}: empty key")
        if key in out:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        if "," in value:
            out[key] = [coerce_scalar(v.strip()) for v in value.split(",")
                        if v.strip()]
        else:
            out[key] = coerce_scalar(value)
    return out


def _as_list(value) -> list:
    return list(value) if isinstance(value, list) else [value]


def config_from_mapping(pairs: dict) -> RunConfig:
    """Build and validate a RunConfig from parsed dotted keys."""
    cfg = RunConfig()
    feature_params: dict[str, dict] = {}
    classifier_params: dict[str, dict] = {}
    feature_order = [m for m, _ in cfg.features]
    classifier_order = [k for k, _ in cfg.classifiers]

    for key, value in pairs.items():
        parts = key.split(".")
        head = parts[0]
        if head not in _TOP_KEYS and head not in _SECTIONS:
            raise ParseError(f"unknown config key {key!r}")
        if head == "features":
            feature_order = [str(v) for v in _as_list(value)]
        elif head == "classifiers":
            classifier_order = [str(v) for v in _as_list(value)]
        elif head == "jobs":
            cfg.jobs = int(value)
        elif head == "raw_baseline":
            cfg.raw_baseline = bool(value)
        elif head == "dataset":
            if len(parts) != 2 or parts[1] not in _DATASET_KEYS:
                raise ParseError(f"unknown config key {key!r}")
            name = parts[1]
            if name == "path":
                cfg.dataset_path = str(value)
            elif name == "test_path":
                cfg.test_path = str(value)
            elif name == "schema":
                cfg.schema = str(value)
            elif name == "side":
                cfg.side = int(value)
            elif name == "synthetic":
                cfg.synthetic = str(value)
            elif name == "samples":
                cfg.samples = int(value)
        elif head == "preprocess":
            if len(parts) != 2 or parts[1] not in _PREPROCESS_KEYS:
                raise ParseError(f"unknown config key {key!r}")
            name = "deskew_enabled" if parts[1] == "deskew" else parts[1]
            cfg.preprocess[name] = value
        elif head == "split":
            if len(parts) != 2 or parts[1] not in _SPLIT_KEYS:
                raise ParseError(f"unknown config key {key!r}")
            setattr(cfg.split, parts[1],
                    bool(value) if parts[1] == "stratified" else value)
        elif head == "feature":
            if len(parts) != 3:
                raise ParseError(f"unknown config key {key!r}")
            feature_params.setdefault(parts[1], {})[parts[2]] = value
        elif head == "classifier":
            if len(parts) != 3:
                raise ParseError(f"unknown config key {key!r}")
            classifier_params.setdefault(parts[1], {})[parts[2]] = value
        elif head == "output":
            if len(parts) != 2 or parts[1] not in _OUTPUT_KEYS:
                raise ParseError(f"unknown config key {key!r}")
            if parts[1] == "dir":
                cfg.out_dir = str(value)
            else:
                cfg.cache_dir = str(value)

    for name in feature_params:
        if name not in feature_order:
            raise ParseError(
                f"feature.{name} configured but {name!r} is not in the "
                f"feature list")
    for name in classifier_params:
        if name not in classifier_order:
            raise ParseError(
                f"classifier.{name} configured but {name!r} is not in the "
                f"classifier list")
    cfg.split = SplitSpec(cfg.split.train_fraction, cfg.split.seed,
                          cfg.split.stratified)
    cfg.features = [(m, feature_params.get(m, {})) for m in feature_order]
    cfg.classifiers = [(k, classifier_params.get(k, {}))
                       for k in classifier_order]
    return cfg.validate()


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return config_from_mapping(parse_config_text(fh.read()))

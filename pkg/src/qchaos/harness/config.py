"""Harness configuration.

Config files are INI-style: ``[section]`` headers followed by ``key = value``
lines.  Keys are case-sensitive and every key is optional except ``model``.
Unknown sections or keys are rejected.

``[model]``
    ``model``: ``sgqc`` | ``shard`` | ``tbrim`` | ``layer3``;
    ``n``: qubit count (sgqc, shard) or particle count (tbrim);
    ``rows``, ``cols``: lattice shape (default: most nearly square factorization of ``n``);
    ``topology``: ``torus_nearest_neighbor`` | ``complete_graph`` | ``star``;
    ``delta0``, ``delta``, ``J``: qubit energies;
    ``m``, ``Delta``, ``U``: orbital count, mean spacing, interaction;
    ``seed``: disorder seed of a single build.

``[sweep]``
    ``couplings``: comma-separated ascending grid of J (qubits) or U (tbrim);
    ``realizations``: disorder realizations per grid point;
    ``target_spacings``: if given, realizations are chosen to reach this many spacings;
    ``eta_c`` (0.3); ``window_fraction`` (0.5); ``smoothing_halfwidth`` (``auto`` or int);
    ``band_fraction`` (0.5, central part of the central band used for averages);
    ``sector``: ``parity`` | ``band``;
    ``seed``: master seed; ``workers``: process count; ``bootstrap`` (200).

``[output]``
    ``out_dir``: directory for CSV files and the manifest.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, replace

from ..errors import QChaosError
from ..models import (LatticeSpec, SGQCParams, TBRIMParams, build_lattice,
                      central_band, lattice_shape)
from ..spectra import window_indices


class ConfigError(QChaosError):
    """Malformed or inconsistent configuration."""


MODEL_KEYS = {"model", "n", "rows", "cols", "topology", "delta0", "delta", "J",
              "m", "Delta", "U", "seed"}
SWEEP_KEYS = {"couplings", "realizations", "target_spacings", "eta_c", "window_fraction",
              "smoothing_halfwidth", "band_fraction", "sector", "seed", "workers", "bootstrap"}
OUTPUT_KEYS = {"out_dir"}
SECTIONS = {"model": MODEL_KEYS, "sweep": SWEEP_KEYS, "output": OUTPUT_KEYS}
MODELS = ("sgqc", "shard", "tbrim", "layer3")


@dataclass(frozen=True)
class ModelConfig:
    model: str = "sgqc"
    n: int | None = None
    rows: int | None = None
    cols: int | None = None
    topology: str | None = None
    delta0: float = 1.0
    delta: float = 1.0
    J: float = 0.0
    m: int | None = None
    Delta: float = 1.0
    U: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.n is None:
            raise ConfigError("model block needs n")
        if self.model in ("tbrim", "layer3") and self.m is None:
            raise ConfigError(f"{self.model} needs m")

    @property
    def is_qubit(self) -> bool:
        return self.model in ("sgqc", "shard")

    def lattice(self) -> LatticeSpec:
        if self.model == "shard":
            return build_lattice(1, self.n, self.topology or "star")
        rows, cols = (self.rows, self.cols) if self.rows else lattice_shape(self.n)
        if cols is None:
            cols = self.n // rows
        if rows * cols != self.n:
            raise ConfigError(f"rows*cols = {rows * cols} != n = {self.n}")
        return build_lattice(rows, cols, self.topology or "torus_nearest_neighbor")

    def sgqc_params(self, coupling=None, seed=None) -> SGQCParams:
        J = self.J if coupling is None else coupling
        seed = self.seed if seed is None else seed
        delta = 2 * self.delta0 if self.model == "shard" else self.delta
        return SGQCParams(self.n, self.delta0, delta, J, self.lattice(), seed)

    def tbrim_params(self, coupling=None, seed=None) -> TBRIMParams:
        U = self.U if coupling is None else coupling
        return TBRIMParams(self.m, self.n, self.Delta, U, self.seed if seed is None else seed)


@dataclass(frozen=True)
class SweepConfig:
    model: ModelConfig
    couplings: tuple[float, ...] = ()
    realizations: int = 1
    target_spacings: int | None = None
    eta_c: float = 0.3
    window_fraction: float = 0.5
    smoothing_halfwidth: int | None = None
    band_fraction: float = 0.5
    sector: str = "parity"
    seed: int = 0
    workers: int = 1
    bootstrap: int = 200
    out_dir: str | None = None
    cap_dim: int | None = None

    def __post_init__(self):
        if self.couplings:
            c = list(self.couplings)
            if c != sorted(c) or len(set(c)) != len(c):
                raise ConfigError("coupling grid must be strictly ascending")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.sector not in ("parity", "band"):
            raise ConfigError(f"unknown sector {self.sector!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def with_(self, **kw) -> "SweepConfig":
        return replace(self, **kw)

    def analysed_dim(self) -> int:
        """Dimension of the block diagonalized per realization."""
        m = self.model
        if m.is_qubit:
            if self.sector == "band":
                return math.comb(m.n, central_band(m.n))
            return 2 ** (m.n - 1)
        return math.comb(m.m, m.n)

    def realizations_needed(self) -> int:
        if not self.target_spacings:
            return self.realizations
        lo, hi = window_indices(self.analysed_dim(), self.window_fraction)
        per = max(hi - lo - 1, 1)
        return max(self.realizations, math.ceil(self.target_spacings / per))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["couplings"] = list(self.couplings)
        return d

    def to_ini(self) -> str:
        """Config file text that parses back to an equal config."""
        lines = ["[model]"]
        for key, value in asdict(self.model).items():
            if value is not None:
                lines.append(f"{key} = {_ini_value(value)}")
        lines.append("")
        lines.append("[sweep]")
        for key in sorted(SWEEP_KEYS):
            value = getattr(self, key)
            if key == "smoothing_halfwidth" and value is None:
                value = "auto"
            if value is None or (key == "couplings" and not value):
                continue
            lines.append(f"{key} = {_ini_value(value)}")
        if self.out_dir is not None:
            lines += ["", "[output]", f"out_dir = {self.out_dir}"]
        return "\n".join(lines) + "\n"


def _ini_value(v) -> str:
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _convert(section, key, raw):
    ints = {"n", "rows", "cols", "m", "seed", "realizations", "target_spacings", "workers", "bootstrap"}
    floats = {"delta0", "delta", "J", "Delta", "U", "eta_c", "window_fraction", "band_fraction"}
    try:
        if key in ints:
            return int(raw)
        if key in floats:
            return float(raw)
        if key == "couplings":
            return tuple(float(x) for x in raw.replace(";", ",").split(",") if x.strip())
        if key == "smoothing_halfwidth":
            return None if raw.strip().lower() == "auto" else int(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc
    return raw.strip()


def parse_config(text: str) -> SweepConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    values = {}
    for section in cp.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            values[(section, key)] = _convert(section, key, raw)
    model_kw = {k: v for (s, k), v in values.items() if s == "model"}
    if "model" not in model_kw:
        raise ConfigError("[model] needs a model key")
    try:
        model = ModelConfig(**model_kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    sweep_kw = {k: v for (s, k), v in values.items() if s == "sweep"}
    if (("output", "out_dir")) in values:
        sweep_kw["out_dir"] = values[("output", "out_dir")]
    return SweepConfig(model=model, **sweep_kw)


def load_config(path) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

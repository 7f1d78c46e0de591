"""2D chaotic maps: classic 1D/2D reference maps and the configurable hybrid family.

The hybrid map combines weighted, post-composed base maps (logistic or sine)
with coupling terms and a drift term, reducing each coordinate mod 1:

    x' = [w * post_base(F(r, x)) + a * coupling(r, x, y)
          + post_drift((b - r) * u / 2)]  mod 1

with the slot (1 or 2) selected by the branch value (y for the x-update, zeta
for the y-update), and u = x (slot 1) or 1 - x (slot 2).  zeta is x before the
update (variant "a") or after it (variant "b").  All named maps come from
fixed catalogs; evaluations that come out non-finite (singularities,
overflow) are substituted by 0 before the mod-1 reduction, which keeps every
configuration total.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, NamedTuple, Protocol

import numpy as np

from .errors import ConfigError, StepError

# --------------------------------------------------------------------------
# base maps
# --------------------------------------------------------------------------


def _logistic(r: float, x: float) -> float:
    return r * x * (1.0 - x)


def _sine(r: float, x: float) -> float:
    return r * math.sin(math.pi * x) / 4.0


def _tent(r: float, x: float) -> float:
    return r * x / 2.0 if x < 0.5 else r * (1.0 - x) / 2.0


_BASE_MAPS: dict[str, Callable[[float, float], float]] = {
    "logistic": _logistic,
    "sine": _sine,
    "tent": _tent,
}


def base_map(kind: str, r: float, x: float) -> float:
    """Evaluate one of the classic 1D maps (logistic, sine, tent). No mod."""
    try:
        fn = _BASE_MAPS[kind.lower()]
    except KeyError:
        raise ConfigError(f"unknown base map kind: {kind!r}") from None
    return fn(r, x)


def logistic2d_step(r: float, state: tuple[float, float]) -> tuple[float, float]:
    """One step of the coupled 2D logistic map (y-update sees the new x)."""
    x, y = state
    xn = r * (3.0 * y + 1.0) * x * (1.0 - x)
    yn = r * (3.0 * xn + 1.0) * y * (1.0 - y)
    return xn, yn


def slmm_step(alpha: float, beta: float, state: tuple[float, float]) -> tuple[float, float]:
    """One step of the 2D sine-logistic modulation map."""
    x, y = state
    xn = alpha * (math.sin(math.pi * y) + beta) * x * (1.0 - x)
    yn = alpha * (math.sin(math.pi * xn) + beta) * y * (1.0 - y)
    return xn, yn


# --------------------------------------------------------------------------
# map catalogs for the hybrid family
# --------------------------------------------------------------------------

_UNARY_MAPS: dict[str, Callable[[float], float]] = {
    "identity": lambda p: p,
    "zero": lambda p: 0.0,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "cot": lambda p: math.cos(p) / math.sin(p),
    "sinh": math.sinh,
    "cosh": math.cosh,
    # 1/tanh instead of cosh/sinh so only the true singularity at 0 trips
    # the guard, not a spurious overflow of cosh for large arguments.
    "coth": lambda p: 1.0 / math.tanh(p),
    "exp": math.exp,
    "log": math.log,
    "sinpi": lambda p: math.sin(math.pi * p),
}

# Coupling terms (r, q, p) -> R.  q is the cross coordinate (x, or zeta in the
# y-update), p is the coordinate being updated-against (y).
_TRANSFER_MAPS: dict[str, Callable[[float, float, float], float]] = {
    "zero": lambda r, q, p: 0.0,
    "exp_rp_plus_exp_rq": lambda r, q, p: math.exp(r * p) + math.exp(r * q),
    "rp_plus_2_7_exp_pi_rq": lambda r, q, p: r * p + (2.0 / 7.0) * math.exp(math.pi * r * q),
    "tan_rq_plus_p": lambda r, q, p: math.tan(r * q + p),
    "exp_20rq": lambda r, q, p: math.exp(20.0 * r * q),
    "rp_plus_12_15_cos_rq": lambda r, q, p: r * p + (12.0 / 15.0) * math.cos(r * q),
    "neg_rp_plus_log_pi_rq": lambda r, q, p: -r * p + math.log(math.pi * r * q),
    "sin_rp_plus_2exp_rq": lambda r, q, p: math.sin(r * p) + 2.0 * math.exp(r * q),
    "exp_20rq_plus_sin_pi_rq": lambda r, q, p: math.exp(20.0 * r * q) + math.sin(math.pi * r * q),
    "p_tan_rq": lambda r, q, p: p * math.tan(r * q),
    "cos_rq": lambda r, q, p: math.cos(r * q),
}


def catalog_names() -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(unary map names, coupling map names) available in configurations."""
    return tuple(sorted(_UNARY_MAPS)), tuple(sorted(_TRANSFER_MAPS))


def _guarded1(fn: Callable[[float], float], p: float) -> float:
    try:
        v = fn(p)
    except (OverflowError, ValueError, ZeroDivisionError):
        return 0.0
    return v if math.isfinite(v) else 0.0


def _guarded3(fn: Callable[[float, float, float], float], r: float, q: float, p: float) -> float:
    try:
        v = fn(r, q, p)
    except (OverflowError, ValueError, ZeroDivisionError):
        return 0.0
    return v if math.isfinite(v) else 0.0


def _mod1(v: float) -> float:
    v = v % 1.0
    # float % can round a tiny negative up to exactly 1.0
    return v if v < 1.0 else 0.0


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UnaryMap:
    """A catalog map with an optional scalar pre-multiplier: p -> base(scale*p)."""

    name: str
    scale: float = 1.0

    def __post_init__(self):
        if self.name not in _UNARY_MAPS:
            raise ConfigError(f"unknown unary map: {self.name!r}")
        if not math.isfinite(self.scale):
            raise ConfigError(f"non-finite scale for map {self.name!r}")

    def __call__(self, p: float) -> float:
        return _UNARY_MAPS[self.name](self.scale * p)

    def serialize(self) -> str:
        if self.scale == 1.0:
            return self.name
        return f"{self.name}*{self.scale:.17g}"

    @classmethod
    def parse(cls, text: str) -> "UnaryMap":
        name, _, scale = text.partition("*")
        name = name.strip()
        try:
            return cls(name, float(scale) if scale else 1.0)
        except ValueError:
            raise ConfigError(f"bad unary map spec: {text!r}") from None


@dataclass(frozen=True)
class MapSlot:
    """One branch of the hybrid update rule (weights plus its four maps)."""

    omega: float
    alpha: float
    beta: float
    base: str  # "logistic" | "sine"
    post_base: UnaryMap
    coupling: str  # name in the transfer catalog
    post_drift: UnaryMap

    def __post_init__(self):
        if self.base not in ("logistic", "sine"):
            raise ConfigError(f"base map must be logistic or sine, got {self.base!r}")
        if self.coupling not in _TRANSFER_MAPS:
            raise ConfigError(f"unknown coupling map: {self.coupling!r}")
        for w in (self.omega, self.alpha, self.beta):
            if not math.isfinite(w):
                raise ConfigError("non-finite weight in map slot")


SLOT_KEYS = ("x1", "x2", "y1", "y2")


@dataclass(frozen=True)
class HybridMapConfig:
    """Full description of one member of the hybrid map family."""

    variant: str  # "a": zeta = x_i, "b": zeta = x_{i+1}
    x1: MapSlot
    x2: MapSlot
    y1: MapSlot
    y2: MapSlot

    def __post_init__(self):
        if self.variant not in ("a", "b"):
            raise ConfigError(f"variant must be 'a' or 'b', got {self.variant!r}")

    def slot(self, key: str) -> MapSlot:
        return getattr(self, key)


class ChaosState(NamedTuple):
    x: float
    y: float
    r: float


class Map2D(Protocol):
    """Anything that advances an (x, y) state under a parameter r."""

    def step(self, x: float, y: float, r: float) -> tuple[float, float]: ...


def _compile_slot(slot: MapSlot, flip: bool):
    w, a, b = slot.omega, slot.alpha, slot.beta
    base = _BASE_MAPS[slot.base]
    f = slot.post_base
    g = _TRANSFER_MAPS[slot.coupling]
    h = slot.post_drift

    if flip:
        def run(r: float, v: float, q: float, p: float, u: float) -> float:
            return (
                w * _guarded1(f, base(r, v))
                + a * _guarded3(g, r, q, p)
                + _guarded1(h, (b - r) * (1.0 - u) * 0.5)
            )
    else:
        def run(r: float, v: float, q: float, p: float, u: float) -> float:
            return (
                w * _guarded1(f, base(r, v))
                + a * _guarded3(g, r, q, p)
                + _guarded1(h, (b - r) * u * 0.5)
            )

    return run


class HybridMap:
    """Compiled form of a :class:`HybridMapConfig`, cheap to step repeatedly."""

    def __init__(self, cfg: HybridMapConfig):
        self.cfg = cfg
        self._x1 = _compile_slot(cfg.x1, flip=False)
        self._x2 = _compile_slot(cfg.x2, flip=True)
        self._y1 = _compile_slot(cfg.y1, flip=False)
        self._y2 = _compile_slot(cfg.y2, flip=True)
        self._next_zeta = cfg.variant == "b"

    def step(self, x: float, y: float, r: float) -> tuple[float, float]:
        sx = self._x1 if y < 0.5 else self._x2
        tx = sx(r, x, x, y, x)
        if not math.isfinite(tx):
            raise StepError(self._diagnose("x", x, y, r))
        xn = _mod1(tx)
        z = xn if self._next_zeta else x
        sy = self._y1 if z < 0.5 else self._y2
        ty = sy(r, y, z, y, z)
        if not math.isfinite(ty):
            raise StepError(self._diagnose("y", x, y, r))
        return xn, _mod1(ty)

    def _diagnose(self, axis: str, x: float, y: float, r: float) -> str:
        slot = self.cfg.slot(f"{axis}1" if (y if axis == "x" else x) < 0.5 else f"{axis}2")
        names = f"post_base={slot.post_base.name}, coupling={slot.coupling}, post_drift={slot.post_drift.name}"
        return f"non-finite {axis}-update at (x={x!r}, y={y!r}, r={r!r}); maps: {names}"


def hybrid_step(cfg: HybridMapConfig, state: ChaosState) -> ChaosState:
    """Single hybrid-map step; prefer HybridMap.step for long sequences."""
    x, y = HybridMap(cfg).step(state.x, state.y, state.r)
    return ChaosState(x, y, state.r)


class Logistic2D:
    """The coupled 2D logistic reference map as a Map2D."""

    def step(self, x: float, y: float, r: float) -> tuple[float, float]:
        return logistic2d_step(r, (x, y))


class Slmm:
    """2D SLMM as a Map2D; r plays the role of alpha, beta is fixed."""

    def __init__(self, beta: float = 3.0):
        self.beta = beta

    def step(self, x: float, y: float, r: float) -> tuple[float, float]:
        return slmm_step(r, self.beta, (x, y))


class EmbeddedLogistic1D:
    """Classic 1D logistic map as a degenerate 2D system (y pinned at 0.5).

    Used by diagnostics to check the Lyapunov machinery against the known
    closed-form exponent ln 2 at r = 4.
    """

    def step(self, x: float, y: float, r: float) -> tuple[float, float]:
        return _logistic(r, x), 0.5


# --------------------------------------------------------------------------
# sequence generation
# --------------------------------------------------------------------------


def sequence(x0: float, y0: float, r: float, n: int, map2d: Map2D) -> np.ndarray:
    """Iterate map2d n times from (x0, y0); row 0 holds x_1..x_n, row 1 y_1..y_n."""
    if n < 1:
        raise ValueError(f"sequence length must be >= 1, got {n}")
    out = np.empty((2, n), dtype=np.float64)
    x, y = x0, y0
    step = map2d.step
    for j in range(n):
        x, y = step(x, y, r)
        out[0, j] = x
        out[1, j] = y
    return out


def truncate(values: np.ndarray, tau: int) -> np.ndarray:
    """Leading tau decimal digits of each value as integers: floor(v * 10^tau)."""
    if tau < 0:
        raise ValueError(f"digit count must be >= 0, got {tau}")
    return np.floor(values * 10.0**tau).astype(np.int64)


def truncated_sequence(
    x0: float, y0: float, r: float, n: int, tau1: int, tau2: int, map2d: Map2D
) -> np.ndarray:
    """Like sequence(), with row 0 cut to tau1 decimal digits and row 1 to tau2."""
    seq = sequence(x0, y0, r, n, map2d)
    out = np.empty((2, n), dtype=np.int64)
    out[0] = truncate(seq[0], tau1)
    out[1] = truncate(seq[1], tau2)
    return out


# --------------------------------------------------------------------------
# built-in configurations and the config file format
# --------------------------------------------------------------------------


def _slot(omega, alpha, beta, base, post_base, coupling, post_drift) -> MapSlot:
    return MapSlot(
        omega=float(omega),
        alpha=float(alpha),
        beta=float(beta),
        base=base,
        post_base=UnaryMap.parse(post_base) if isinstance(post_base, str) else post_base,
        coupling=coupling,
        post_drift=UnaryMap.parse(post_drift) if isinstance(post_drift, str) else post_drift,
    )


def case_config(case: int) -> HybridMapConfig:
    """The three studied members of the family. Case 3 is the pipeline default."""
    if case == 1:
        return HybridMapConfig(
            variant="b",
            x1=_slot(10, 2, 80, "logistic", "tan", "exp_rp_plus_exp_rq", "sin*2"),
            x2=_slot(20, 7, 20, "logistic", "sin", "rp_plus_2_7_exp_pi_rq", "sin*4"),
            y1=_slot(10, 2, 50, "logistic", "sin", "tan_rq_plus_p", "exp*2"),
            y2=_slot(20, 2, 30, "logistic", "identity", "exp_20rq", "cos*4"),
        )
    if case == 2:
        return HybridMapConfig(
            variant="b",
            x1=_slot(1, 15, 26, "logistic", "cos", "rp_plus_12_15_cos_rq", "sin*2"),
            x2=_slot(10, 7, 2, "sine", "cot", "neg_rp_plus_log_pi_rq", "exp*4"),
            y1=_slot(16, 2, 50, "sine", "identity", "tan_rq_plus_p", "exp*2"),
            y2=_slot(20, 14, 30, "logistic", "sinpi", "exp_20rq", "cot*4"),
        )
    if case == 3:
        return HybridMapConfig(
            variant="a",
            x1=_slot(10, 2, 80, "logistic", "identity", "sin_rp_plus_2exp_rq", "sin*2"),
            x2=_slot(5, 7, 20, "sine", "coth", "exp_20rq_plus_sin_pi_rq", "cos*4"),
            y1=_slot(20, 2, 50, "sine", "sin", "p_tan_rq", "sinh*2"),
            y2=_slot(30, 4, 3, "logistic", "identity", "cos_rq", "identity*4"),
        )
    raise ConfigError(f"no built-in case {case}")


def default_map() -> HybridMap:
    """Compiled case-3 map, the default for every pipeline."""
    return HybridMap(case_config(3))


_FLOAT_FIELDS = ("omega", "alpha", "beta")
_MAP_FIELDS = ("base", "post_base", "coupling", "post_drift")


def dumps_config(cfg: HybridMapConfig) -> str:
    """Serialize a configuration to the text format (round-trips exactly)."""
    lines = ["[map]", f"variant = {cfg.variant}", ""]
    for key in SLOT_KEYS:
        slot = cfg.slot(key)
        lines.append(f"[{key}]")
        for fld in _FLOAT_FIELDS:
            lines.append(f"{fld} = {getattr(slot, fld):.17g}")
        lines.append(f"base = {slot.base}")
        lines.append(f"post_base = {slot.post_base.serialize()}")
        lines.append(f"coupling = {slot.coupling}")
        lines.append(f"post_drift = {slot.post_drift.serialize()}")
        lines.append("")
    return "\n".join(lines)


def parse_config(text: str) -> HybridMapConfig:
    """Parse the text format produced by dumps_config()."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config file: {exc}") from None
    try:
        variant = parser.get("map", "variant").strip()
        slots = {}
        for key in SLOT_KEYS:
            sec = parser[key]
            slots[key] = MapSlot(
                omega=float(sec["omega"]),
                alpha=float(sec["alpha"]),
                beta=float(sec["beta"]),
                base=sec["base"].strip(),
                post_base=UnaryMap.parse(sec["post_base"]),
                coupling=sec["coupling"].strip(),
                post_drift=UnaryMap.parse(sec["post_drift"]),
            )
    except (configparser.Error, KeyError, ValueError) as exc:
        raise ConfigError(f"bad config file: {exc}") from None
    return HybridMapConfig(variant=variant, **slots)


def save_config(cfg: HybridMapConfig, path: str | Path) -> None:
    Path(path).write_text(dumps_config(cfg))


def load_config(source: str | Path) -> HybridMapConfig:
    """Load a config from a file path or a built-in name (case1, case2, case3)."""
    name = str(source)
    if name in ("case1", "case2", "case3"):
        data = resources.files("chaoscrypt.configs").joinpath(f"{name}.cfg").read_text()
        return parse_config(data)
    path = Path(source)
    if not path.exists():
        raise ConfigError(f"config not found: {source}")
    return parse_config(path.read_text())

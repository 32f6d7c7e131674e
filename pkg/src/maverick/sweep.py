"""Convergence sweeps over ``(N, epsilon)`` grids.

A sweep is described by a flat ``key = value`` file::

    # decay of the frequency tail for identical qubits
    mode = frequency
    state = iid
    p = 0.3
    n_grid = 100, 1000, 10000
    epsilon_grid = 0.05

Recognised keys:

``mode``           ``frequency`` or ``entropy-rate``
``state``          ``iid`` | ``sites`` | ``random``
``p``              weight of outcome 1 for ``state = iid``, in (0, 1)
``sites``          ``;``-separated site weight lists, e.g. ``0.7,0.3; 0.5,0.25,0.25``
``seed``           integer seed, required for ``state = random``
``dim_min``        smallest random site dimension (default 2)
``dim_max``        largest random site dimension (default 2)
``count``          number of distinct random sites (default 4)
``n_grid``         comma-separated positive integers
``epsilon_grid``   comma-separated positive reals
``bin_width``      grid spacing of the binned convolution (default 1e-4)
``out``            output path (default: standard output)
``workers``        grid points evaluated concurrently (default 1)
``format``         ``csv`` or ``json`` (default csv)

Explicit and random site lists are cycled to length ``N``. Unknown keys are
rejected.
"""
from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .bounds import (
    HOLDS_SLACK,
    frequency_chebyshev_bound,
    hoeffding_bound,
    product_chebyshev_bound,
)
from .errors import ConfigInvalid, MaverickError
from .state import ENUMERATION_LIMIT, ProductState, SiteDistribution, random_site
from .tails import (
    Mode,
    TailQuery,
    binomial_maverick_norm,
    bruteforce_maverick_norm,
    dp_entropy_tail_bracket,
    poisson_binomial_maverick_norm,
)

COLUMNS = ("N", "epsilon", "exact_or_lo", "hi", "hoeffding",
           "chebyshev_sum", "chebyshev_uniform", "method")

_KEYS = {"mode", "state", "p", "sites", "seed", "dim_min", "dim_max", "count",
         "n_grid", "epsilon_grid", "bin_width", "out", "workers", "format"}


@dataclass(frozen=True)
class SweepConfig:
    mode: Mode
    n_grid: tuple
    epsilon_grid: tuple
    state: str = "iid"
    p: Optional[float] = None
    sites: Optional[tuple] = None
    seed: Optional[int] = None
    dim_min: int = 2
    dim_max: int = 2
    count: int = 4
    bin_width: float = 1e-4
    out: Optional[str] = None
    workers: int = 1
    format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        self.validate()

    def validate(self):
        if not self.n_grid:
            raise ConfigInvalid("n_grid", "must not be empty")
        if any(int(n) != n or n < 1 for n in self.n_grid):
            raise ConfigInvalid("n_grid", "entries must be positive integers")
        if not self.epsilon_grid:
            raise ConfigInvalid("epsilon_grid", "must not be empty")
        if any(not (e > 0 and math.isfinite(e)) for e in self.epsilon_grid):
            raise ConfigInvalid("epsilon_grid", "entries must be positive reals")
        if self.state not in ("iid", "sites", "random"):
            raise ConfigInvalid("state", f"expected iid, sites or random, got {self.state!r}")
        if self.state == "iid":
            if self.p is None or not 0.0 < self.p < 1.0:
                raise ConfigInvalid("p", "iid states need 0 < p < 1")
        if self.state == "sites" and not self.sites:
            raise ConfigInvalid("sites", "explicit site list required for state = sites")
        if self.state == "random":
            if self.seed is None:
                raise ConfigInvalid("seed", "random sites need a seed")
            if not 1 <= self.dim_min <= self.dim_max:
                raise ConfigInvalid("dim_min", "need 1 <= dim_min <= dim_max")
            if self.count < 1:
                raise ConfigInvalid("count", "must be positive")
        if not self.bin_width > 0:
            raise ConfigInvalid("bin_width", "must be positive")
        if self.workers < 1:
            raise ConfigInvalid("workers", "must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigInvalid("format", "expected csv or json")
        if self.mode is Mode.FREQUENCY:
            qubits = (self.state == "iid"
                      or (self.state == "sites" and all(len(s) == 2 for s in self.sites))
                      or (self.state == "random" and self.dim_min == self.dim_max == 2))
            if not qubits:
                raise ConfigInvalid("mode", "frequency mode needs qubit sites")


def _parse_list(field, text, cast):
    try:
        return tuple(cast(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigInvalid(field, str(exc)) from None


def _int(text):
    f = float(text)
    if f != int(f):
        raise ValueError(f"{text!r} is not an integer")
    return int(f)


def parse_config(text: str) -> SweepConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(f"line {lineno}", "expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigInvalid(key, "unknown key")
        if key in raw:
            raise ConfigInvalid(key, "given twice")
        raw[key] = value

    kw = {}
    try:
        for key, value in raw.items():
            if key == "n_grid":
                kw[key] = _parse_list(key, value, _int)
            elif key == "epsilon_grid":
                kw[key] = _parse_list(key, value, float)
            elif key == "sites":
                kw[key] = tuple(_parse_list(key, chunk, float)
                                for chunk in value.split(";") if chunk.strip())
            elif key in ("p", "bin_width"):
                kw[key] = float(value)
            elif key in ("seed", "dim_min", "dim_max", "count", "workers"):
                kw[key] = _int(value)
            elif key == "mode":
                kw[key] = Mode.parse(value)
            else:
                kw[key] = value
    except ValueError as exc:
        raise ConfigInvalid(key, str(exc)) from None
    for key in ("mode", "n_grid", "epsilon_grid"):
        if key not in kw:
            raise ConfigInvalid(key, "required")
    if kw.get("sites") is not None:
        try:
            for s in kw["sites"]:
                SiteDistribution.from_probabilities(s)
        except (ValueError, MaverickError) as exc:
            raise ConfigInvalid("sites", str(exc)) from None
    return SweepConfig(**kw)


def load_config(path: str) -> SweepConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def site_pool(config: SweepConfig) -> tuple:
    """The distinct sites a state of any ``N`` is cycled from."""
    if config.state == "iid":
        return (SiteDistribution.from_probabilities([1.0 - config.p, config.p]),)
    if config.state == "sites":
        return tuple(SiteDistribution.from_probabilities(s) for s in config.sites)
    rng = np.random.default_rng(config.seed)
    dims = rng.integers(config.dim_min, config.dim_max + 1, size=config.count)
    return tuple(random_site(rng, int(d)) for d in dims)


def build_state(config: SweepConfig, N: int, pool=None) -> ProductState:
    pool = site_pool(config) if pool is None else pool
    return ProductState(tuple(pool[i % len(pool)] for i in range(N)))


def evaluate_point(config: SweepConfig, N: int, epsilon: float, pool=None) -> dict:
    state = build_state(config, N, pool)
    row = {"N": N, "epsilon": epsilon}
    if config.mode is Mode.FREQUENCY:
        if config.state == "iid":
            exact = binomial_maverick_norm(config.p, N, epsilon)
        else:
            exact = poisson_binomial_maverick_norm(state, epsilon)
        row.update(exact_or_lo=exact, hi=exact, hoeffding=hoeffding_bound(N, epsilon),
                   method="exact")
        cheb = frequency_chebyshev_bound(state, epsilon)
    else:
        if state.total_dimension <= ENUMERATION_LIMIT:
            exact = bruteforce_maverick_norm(state, TailQuery(Mode.ENTROPY_RATE, epsilon))
            row.update(exact_or_lo=exact, hi=exact, method="exact")
        else:
            b = dp_entropy_tail_bracket(state, epsilon, config.bin_width)
            row.update(exact_or_lo=b.lo, hi=b.hi, method="bracket")
        row["hoeffding"] = None
        cheb = product_chebyshev_bound(state, epsilon)
    row["chebyshev_sum"], row["chebyshev_uniform"] = cheb
    return {k: row[k] for k in COLUMNS}


def run_sweep(config: SweepConfig) -> list:
    """One row per grid point, sorted by ``(N, epsilon)``."""
    pool = site_pool(config)
    points = sorted({(int(n), float(e)) for n in config.n_grid for e in config.epsilon_grid})
    with ThreadPoolExecutor(max_workers=config.workers) as ex:
        rows = list(ex.map(lambda pt: evaluate_point(config, pt[0], pt[1], pool), points))
    return rows


def check_rows(rows) -> list:
    """Column sanity problems, as human-readable strings."""
    problems = []
    for r in rows:
        tag = f"N={r['N']} epsilon={r['epsilon']!r}"
        if r["exact_or_lo"] > r["hi"]:
            problems.append(f"{tag}: exact_or_lo > hi")
        for col in ("hoeffding", "chebyshev_sum", "chebyshev_uniform"):
            if r[col] is not None and r[col] + HOLDS_SLACK < r["hi"]:
                problems.append(f"{tag}: {col} below {r['method']} value")
    return problems


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.17g}"


def format_rows(rows, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps([{k: r[k] for k in COLUMNS} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(r[k]) for k in COLUMNS) + "\n")
    return buf.getvalue()


def write_rows(rows, path: Optional[str], fmt: str = "csv", stream=None) -> str:
    text = format_rows(rows, fmt)
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    elif stream is not None:
        stream.write(text)
    return text


def with_overrides(config: SweepConfig, **overrides) -> SweepConfig:
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})

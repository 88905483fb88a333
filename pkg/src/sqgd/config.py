"""Run configuration: a flat key=value file with command-line overrides.

Every key maps one-to-one onto a :class:`RunConfig` field, which keeps
configs trivially parseable and diff-friendly for sweep provenance.
Overrides win over the file, which wins over the defaults below.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dataclass_fields, replace
from pathlib import Path
from typing import Any

from .integrator import StepControl
from .modulus import ModulusParams


@dataclass(frozen=True)
class RunConfig:
    # resolution and physics
    n: int = 64
    t_end: float = 1.0
    A: float = 0.0
    advection_sign: int = 1
    # time stepping
    step_mode: str = "cfl"
    dt_fixed: float = 1e-3
    cfl_number: float = 0.5
    dt_max: float = 0.01
    # modulus family
    gamma: float = 0.01
    delta: float = 0.02
    c_omega: float = 1.0
    # initial data
    init: str = "random_smooth"
    init_seed: int = 0
    init_slope: float = 2.0
    init_kmax: int = 8
    init_linf: float = 1.0
    init_width: float = 0.5
    init_path: str = ""
    # cadences and output
    sample_every: float = 0.1
    certify_every: int = 0
    certify_mode: str = "auto"
    certify_samples: int = 2_000_000
    certify_seed: int = 0
    output_dir: str = "out"

    def __post_init__(self) -> None:
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.advection_sign not in (1, -1):
            raise ValueError("advection_sign must be +1 or -1")
        if self.sample_every <= 0:
            raise ValueError("sample_every must be positive")
        if self.certify_every < 0:
            raise ValueError("certify_every must be nonnegative")
        if self.init not in ("random_smooth", "single_mode", "two_mode",
                             "gaussian_bump", "snapshot"):
            raise ValueError(f"unknown init profile {self.init!r}")
        if self.init == "snapshot" and not self.init_path:
            raise ValueError("init=snapshot requires init_path")

    def step_control(self) -> StepControl:
        return StepControl(
            mode=self.step_mode,
            dt_fixed=self.dt_fixed,
            cfl_number=self.cfl_number,
            dt_max=self.dt_max,
        )

    def modulus_params(self) -> ModulusParams:
        return ModulusParams(gamma=self.gamma, delta=self.delta, c_omega=self.c_omega)

    def resolved_certify_mode(self) -> str:
        """'auto' picks the exhaustive scan when it is affordable."""
        if self.certify_mode != "auto":
            return self.certify_mode
        from .modulus import EXHAUSTIVE_LIMIT

        return "exhaustive" if self.n <= EXHAUSTIVE_LIMIT else "sampled"


_FIELD_TYPES = {f.name: f.type for f in dataclass_fields(RunConfig)}


def _coerce(key: str, text: str) -> Any:
    kind = _FIELD_TYPES[key]
    text = text.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        return text
    except ValueError as exc:
        raise ValueError(f"config key {key!r}: cannot parse {text!r}") from exc


def parse_config_file(path: str | Path) -> dict[str, Any]:
    """Parse `key = value` lines; '#' starts a comment, blanks ignored."""
    settings: dict[str, Any] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        settings[key] = _coerce(key, value)
    return settings


def build_config(file_path: str | None, overrides: dict[str, Any]) -> RunConfig:
    """Defaults, then file settings, then overrides."""
    settings: dict[str, Any] = {}
    if file_path:
        settings.update(parse_config_file(file_path))
    settings.update({k: v for k, v in overrides.items() if v is not None})
    return replace(RunConfig(), **settings) if settings else RunConfig()

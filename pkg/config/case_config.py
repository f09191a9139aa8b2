"""
Case configuration: per-equation YAML defaults merged below a case file.
"""
import copy
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml

from dgsem.errors import ConfigError
from dgsem.initial_conditions import check_parameters
from dgsem.physics import GasParams
from dgsem.scheme import SchemeConfig
from dgsem.time_integration import SCHEMES

logger = logging.getLogger(__name__)

EQUATIONS = ("advdiff1d", "burgers1d", "nse3d")
SECTIONS = ("case", "mesh", "scheme", "gas", "coefficients", "initial_condition", "sweep")
# sections whose keys are not fixed by the defaults file
OPEN_SECTIONS = ("initial_condition",)

PARAM_ALIASES = {
    "N": "case.degree",
    "degree": "case.degree",
    "elements": "mesh.elements",
}

DEFAULT_CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "equations")


@dataclass
class CaseConfig:
    """A validated case. ``raw`` keeps the merged dictionary for the report echo."""
    name: str
    equation: str
    degree: int
    t_end: float
    cfl: float
    time_scheme: str
    diagnostic_every: int
    snapshot_every: int
    output_dir: str
    deterministic: bool
    threads: int
    seed: int
    max_steps: Optional[int]
    mesh: Dict[str, Any]
    scheme: SchemeConfig
    gas: Optional[GasParams]
    coefficients: Dict[str, Any]
    initial_condition: str
    initial_params: Dict[str, Any]
    sweep: Dict[str, Any]
    raw: Dict[str, Any] = field(repr=False, default_factory=dict)


def _read_yaml(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as stream:
        data = yaml.safe_load(stream)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def load_equation_defaults(equation: str, config_dir: str = DEFAULT_CONFIG_DIR) -> Dict[str, Any]:
    path = os.path.join(config_dir, f"{equation}.yaml")
    if equation not in EQUATIONS or not os.path.exists(path):
        raise ConfigError(f"Unknown equation '{equation}', expected one of {EQUATIONS}")
    return _read_yaml(path)


def merge_config(defaults: Dict[str, Any], case: Dict[str, Any]) -> Dict[str, Any]:
    """Overlay the case file on the defaults section by section; unknown keys raise."""
    merged = copy.deepcopy(defaults)
    merged.pop("equation", None)
    merged.pop("description", None)
    for section, values in case.items():
        if section not in SECTIONS:
            raise ConfigError(f"Unknown section '{section}', expected one of {SECTIONS}")
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ConfigError(f"Section '{section}' must be a mapping")
        if section not in merged:
            raise ConfigError(f"Section '{section}' does not apply to this equation")
        base = merged[section]
        for key, value in values.items():
            if section == "initial_condition" and key == "params":
                base["params"] = dict(value or {})
            elif key not in base and section not in OPEN_SECTIONS:
                raise ConfigError(f"Unknown key '{section}.{key}'")
            else:
                base[key] = value
    return merged


def parse_value(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as error:
        raise ConfigError(f"Cannot parse value '{text}': {error}") from error


def resolve_param(key: str) -> Tuple[str, str]:
    dotted = PARAM_ALIASES.get(key, key)
    if "." not in dotted:
        raise ConfigError(f"Parameter '{key}' must be written as section.key")
    section, name = dotted.split(".", 1)
    return section, name


def apply_overrides(merged: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply ``section.key=value`` strings on top of a merged config."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"Override '{item}' must look like section.key=value")
        key, text = item.split("=", 1)
        section, name = resolve_param(key.strip())
        if section == "initial_condition" and name.startswith("params."):
            merged[section].setdefault("params", {})[name.split(".", 1)[1]] = parse_value(text)
            continue
        if section not in merged or (name not in merged[section] and section not in OPEN_SECTIONS):
            raise ConfigError(f"Unknown override key '{section}.{name}'")
        merged[section][name] = parse_value(text)
    return merged


def parse_sweep_values(text: str) -> List[Any]:
    """'2..7' -> [2, 3, 4, 5, 6, 7]; '2,4,8' -> [2, 4, 8]."""
    text = text.strip()
    if ".." in text:
        start, stop = text.split("..", 1)
        try:
            return list(range(int(start), int(stop) + 1))
        except ValueError as error:
            raise ConfigError(f"Bad sweep range '{text}'") from error
    values = [parse_value(part) for part in text.split(",") if part.strip()]
    if not values:
        raise ConfigError("Sweep needs at least one value")
    return values


def _float(section: Dict[str, Any], key: str, where: str) -> float:
    value = section.get(key)
    if isinstance(value, str) and value.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}") from None


def _int(section: Dict[str, Any], key: str, where: str) -> int:
    value = section.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key} must be an integer, got {value!r}")
    return value


def build_case_config(merged: Dict[str, Any], equation: str) -> CaseConfig:
    """Validate a merged dictionary. Nothing numerical is allocated here."""
    case = merged["case"]
    degree = _int(case, "degree", "case")
    if degree < 1:
        raise ConfigError(f"case.degree must be >= 1, got {degree}")
    t_end = _float(case, "t_end", "case")
    if not t_end >= 0.0 or math.isinf(t_end):
        raise ConfigError(f"case.t_end must be finite and >= 0, got {t_end}")
    cfl = _float(case, "cfl", "case")
    if not 0.0 < cfl <= 1.0:
        raise ConfigError(f"case.cfl must lie in (0, 1], got {cfl}")
    if case["time_scheme"] not in SCHEMES:
        raise ConfigError(f"case.time_scheme must be one of {sorted(SCHEMES)}, got {case['time_scheme']!r}")
    diagnostic_every = _int(case, "diagnostic_every", "case")
    snapshot_every = _int(case, "snapshot_every", "case")
    threads = _int(case, "threads", "case")
    if diagnostic_every < 1 or snapshot_every < 0 or threads < 1:
        raise ConfigError("case.diagnostic_every and case.threads must be >= 1, case.snapshot_every >= 0")
    max_steps = case.get("max_steps")
    if max_steps is not None and (not isinstance(max_steps, int) or max_steps < 0):
        raise ConfigError(f"case.max_steps must be a non-negative integer, got {max_steps!r}")

    scheme_section = merged["scheme"]
    scheme = SchemeConfig(volume=scheme_section.get("volume", "entropy_conservative"),
                          interface=scheme_section.get("interface", "ec"),
                          sigma=_float(scheme_section, "sigma", "scheme") if "sigma" in scheme_section else 1.0)
    scheme.validate(equation)

    gas = None
    if equation == "nse3d":
        section = merged["gas"]
        values = {key: _float(section, key, "gas") for key in ("gamma", "reynolds", "prandtl", "mach", "viscosity")}
        try:
            gas = GasParams(**values)
        except Exception as error:
            raise ConfigError(f"Invalid gas parameters: {error}") from error

    mesh = merged["mesh"]
    if equation == "nse3d":
        if not mesh.get("file"):
            elements = mesh.get("elements")
            if (not isinstance(elements, list) or len(elements) != 3
                    or not all(isinstance(e, int) and e >= 1 for e in elements)):
                raise ConfigError(f"mesh.elements must be three positive integers, got {elements!r}")
    else:
        if not isinstance(mesh.get("elements"), int) or mesh["elements"] < 1:
            raise ConfigError(f"mesh.elements must be a positive integer, got {mesh.get('elements')!r}")
        if _float(mesh, "length", "mesh") <= 0.0:
            raise ConfigError("mesh.length must be positive")

    coefficients = dict(merged.get("coefficients", {}))
    for key, value in coefficients.items():
        number = _float(coefficients, key, "coefficients")
        if number < 0.0:
            raise ConfigError(f"coefficients.{key} must be non-negative, got {value}")

    initial = merged["initial_condition"]
    name = initial.get("name")
    params = dict(initial.get("params") or {})
    check_parameters(equation, name, params)

    return CaseConfig(
        name=str(case["name"]),
        equation=equation,
        degree=degree,
        t_end=t_end,
        cfl=cfl,
        time_scheme=case["time_scheme"],
        diagnostic_every=diagnostic_every,
        snapshot_every=snapshot_every,
        output_dir=str(case["output_dir"]),
        deterministic=bool(case["deterministic"]),
        threads=threads,
        seed=_int(case, "seed", "case"),
        max_steps=max_steps,
        mesh=dict(mesh),
        scheme=scheme,
        gas=gas,
        coefficients=coefficients,
        initial_condition=name,
        initial_params=params,
        sweep=dict(merged.get("sweep", {})),
        raw=merged,
    )


def load_case(path: str, overrides: Sequence[str] = (), config_dir: str = DEFAULT_CONFIG_DIR) -> CaseConfig:
    """Read a case file, merge it below its equation defaults, apply overrides and validate."""
    case = _read_yaml(path)
    equation = (case.get("case") or {}).get("equation")
    if equation is None:
        raise ConfigError(f"{path}: case.equation is required")
    defaults = load_equation_defaults(equation, config_dir)
    case_section = dict(case["case"])
    case_section.pop("equation")
    case = dict(case, case=case_section)
    merged = apply_overrides(merge_config(defaults, case), overrides)
    merged["case"]["equation"] = equation
    logger.debug("Merged configuration for %s: %s", path, merged)
    config = build_case_config(merged, equation)
    logger.info("Loaded case '%s' (%s, N=%d)", config.name, equation, config.degree)
    return config

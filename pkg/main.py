#!/usr/bin/env python3
"""
Entropy stable DGSEM batch driver
Runs cases, audits and convergence sweeps for the equation plugins
"""
import argparse
import hashlib
import logging
import math
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from config.case_config import (
    DEFAULT_CONFIG_DIR,
    CaseConfig,
    EQUATIONS,
    load_case,
    load_equation_defaults,
    parse_sweep_values,
    resolve_param,
)
from dgsem.errors import ConfigError, DGSEMError, MeshError, StateError
from dgsem.time_integration import advance
from plugins.advdiff_plugin import AdvectionDiffusionPlugin
from plugins.base_plugin import AuditResult, BaseEquationPlugin
from plugins.burgers_plugin import BurgersPlugin
from plugins.nse_plugin import NavierStokesPlugin

logger = logging.getLogger("dgsem")

EXIT_OK = 0
EXIT_AUDIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_STATE = 3
EXIT_IO = 4

PLUGIN_CLASSES = {
    "advdiff1d": AdvectionDiffusionPlugin,
    "burgers1d": BurgersPlugin,
    "nse3d": NavierStokesPlugin,
}


def provenance_hash(text: str) -> str:
    """Git-style blob SHA-1 of a text."""
    data = text.encode("utf-8")
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def config_echo(case: CaseConfig) -> str:
    return yaml.safe_dump(case.raw, sort_keys=True, default_flow_style=False)


class DGSEMDriver:
    """
    Batch driver with one plugin per equation, configured from the YAML
    defaults in config/equations.
    """

    def __init__(self, config_dir: str = DEFAULT_CONFIG_DIR):
        self.config_dir = config_dir
        self.plugins: Dict[str, BaseEquationPlugin] = {}
        self._load_plugins()

    def _load_plugins(self) -> None:
        """Register a plugin for every equation with a defaults file."""
        for equation in EQUATIONS:
            config = load_equation_defaults(equation, self.config_dir)
            self.plugins[equation] = PLUGIN_CLASSES[equation](config)
        logger.debug("Registered plugins for equations: %s", list(self.plugins))

    def plugin_for(self, case: CaseConfig) -> BaseEquationPlugin:
        plugin = self.plugins[case.equation]
        plugin.setup(case)
        return plugin

    # ------------------------------------------------------------------
    # reports and artifacts
    # ------------------------------------------------------------------

    @staticmethod
    def write_report(case: CaseConfig, path: str, audits: Sequence[AuditResult],
                     summary: Sequence[str] = ()) -> None:
        echo = config_echo(case)
        with open(path, "w", encoding="utf-8") as stream:
            stream.write(f"# case: {case.name}\n")
            stream.write(f"# config-sha1: {provenance_hash(echo)}\n")
            for line in echo.splitlines():
                stream.write(f"#   {line}\n")
            for line in summary:
                stream.write(f"{line}\n")
            for result in audits:
                stream.write(result.line() + "\n")

    @staticmethod
    def write_snapshot(plugin: BaseEquationPlugin, directory: str, step: int, t: float, u: np.ndarray) -> str:
        name = f"snapshot_{step:06d}.dat"
        rows = plugin.snapshot_rows(u)
        with open(os.path.join(directory, name), "w", encoding="utf-8") as stream:
            stream.write("# dgsem snapshot\n")
            stream.write(f"step {step}\n")
            stream.write(f"time {t:.17g}\n")
            stream.write(f"elements {len(rows)}\n")
            for element, values in rows:
                stream.write(f"element {element}\n")
                for row in values:
                    stream.write(" ".join(f"{value:.17g}" for value in row) + "\n")
        with open(os.path.join(directory, "index.txt"), "a", encoding="utf-8") as index:
            index.write(f"{step} {t:.17g} {name}\n")
        return name

    # ------------------------------------------------------------------
    # commands
    # ------------------------------------------------------------------

    def audit_case(self, case: CaseConfig) -> int:
        """Semi-discrete checks at the initial state, written to report.txt."""
        os.makedirs(case.output_dir, exist_ok=True)
        plugin = self.plugin_for(case)
        audits = plugin.audits(plugin.initial_state())
        for result in audits:
            logger.info(result.line())
        self.write_report(case, os.path.join(case.output_dir, "report.txt"), audits)
        return EXIT_OK if all(result.passed for result in audits) else EXIT_AUDIT_FAILED

    def run_case(self, case: CaseConfig) -> int:
        """Audit, integrate to t_end and write series.csv, snapshots and report.txt."""
        os.makedirs(case.output_dir, exist_ok=True)
        plugin = self.plugin_for(case)
        u = plugin.initial_state()
        audits = plugin.audits(u)
        series = plugin.new_series()
        plugin.record(series, 0.0, u)

        snapshot_dir = os.path.join(case.output_dir, "snapshots")
        if case.snapshot_every:
            os.makedirs(snapshot_dir, exist_ok=True)
            open(os.path.join(snapshot_dir, "index.txt"), "w").close()
            self.write_snapshot(plugin, snapshot_dir, 0, 0.0, u)

        last = {"step": 0, "t": 0.0, "u": u}

        def callback(step: int, t: float, state: np.ndarray) -> None:
            last.update(step=step, t=t, u=state)
            if step % case.diagnostic_every == 0:
                plugin.record(series, t, state)
                logger.info("step %d  t=%.6e", step, t)
            if case.snapshot_every and step % case.snapshot_every == 0:
                self.write_snapshot(plugin, snapshot_dir, step, t, state)

        status, summary = EXIT_OK, []
        try:
            u, t, steps = advance(u, plugin.rhs, 0.0, case.t_end, plugin.estimate_dt,
                                  scheme=case.time_scheme, callback=callback, max_steps=case.max_steps)
            if steps % case.diagnostic_every and t > 0.0:
                plugin.record(series, t, u)
            summary.append(f"# completed: steps={steps} t={t:.17g}")
            error = plugin.l2_error(u, t)
            if error is not None:
                summary.append(f"# l2_error: {error:.17g}")
        except StateError as failure:
            logger.error("Run aborted at step %d, t=%.6e: %s", last["step"], last["t"], failure)
            summary.append(f"# aborted: step={last['step']} t={last['t']:.17g} reason={failure}")
            status = EXIT_STATE

        series.finalize().write_csv(os.path.join(case.output_dir, "series.csv"))
        self.write_report(case, os.path.join(case.output_dir, "report.txt"), audits, summary)
        if status == EXIT_OK and not all(result.passed for result in audits):
            status = EXIT_AUDIT_FAILED
        return status

    def run_sweep(self, case_path: str, overrides: Sequence[str], param: str,
                  values: Sequence, output_dir: Optional[str] = None) -> Tuple[int, List[Dict]]:
        """Run the case once per value and tabulate the L2 error against the exact solution."""
        section, name = resolve_param(param)
        rows: List[Dict] = []
        out = None
        for value in values:
            case = load_case(case_path, list(overrides) + [f"{section}.{name}={value}"], self.config_dir)
            out = output_dir or case.output_dir
            plugin = self.plugin_for(case)
            u = plugin.initial_state()
            u, t, _ = advance(u, plugin.rhs, 0.0, case.t_end, plugin.estimate_dt,
                              scheme=case.time_scheme, max_steps=case.max_steps)
            error = plugin.l2_error(u, t)
            if error is None:
                raise ConfigError(f"Case '{case.name}' has no exact solution to sweep against")
            dim = 3 if case.equation == "nse3d" else 1
            dofs = int(u.size // (5 if dim == 3 else 1))
            row = {"param": f"{section}.{name}", "value": value, "dofs": dofs, "l2_error": error,
                   "order": math.nan}
            if rows and rows[-1]["l2_error"] > 0.0 and error > 0.0 and dofs != rows[-1]["dofs"]:
                ratio = (dofs / rows[-1]["dofs"]) ** (1.0 / dim)
                row["order"] = -math.log(error / rows[-1]["l2_error"]) / math.log(ratio)
            rows.append(row)
            logger.info("sweep %s=%s: dofs=%d l2_error=%.6e order=%.2f", param, value, dofs, error, row["order"])
        if out is not None:
            os.makedirs(out, exist_ok=True)
            with open(os.path.join(out, "sweep.csv"), "w", encoding="utf-8") as stream:
                stream.write("param,value,dofs,l2_error,order\n")
                for row in rows:
                    order = "" if math.isnan(row["order"]) else f"{row['order']:.17g}"
                    stream.write(f"{row['param']},{row['value']},{row['dofs']},{row['l2_error']:.17g},{order}\n")
        return EXIT_OK, rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Entropy stable DGSEM batch driver")
    parser.add_argument("command", choices=("run", "audit", "sweep"))
    parser.add_argument("case_file", help="YAML case file")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for the volume phase")
    parser.add_argument("--deterministic", action="store_true", help="single-threaded, fixed reduction order")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--param", action="append", default=[],
                        help="section.key=value override; for sweep also NAME=a..b or NAME=v1,v2")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def _split_params(command: str, params: Sequence[str]) -> Tuple[List[str], Optional[Tuple[str, List]]]:
    overrides, sweep = [], None
    for item in params:
        key, _, text = item.partition("=")
        if command == "sweep" and (".." in text or "," in text) and sweep is None:
            sweep = (key.strip(), parse_sweep_values(text))
        else:
            overrides.append(item)
    return overrides, sweep


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main function for command line usage"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")

    case = None
    try:
        overrides, sweep = _split_params(args.command, args.param)
        if args.threads is not None:
            overrides.append(f"case.threads={args.threads}")
            if not args.deterministic:
                overrides.append("case.deterministic=false")
        if args.deterministic:
            overrides.append("case.deterministic=true")
        if args.out:
            overrides.append(f"case.output_dir={args.out}")

        case = load_case(args.case_file, overrides)
        driver = DGSEMDriver()
        logger.info("Entropy stable DGSEM driver: %s %s (%s)", args.command, args.case_file, case.equation)

        if args.command == "audit":
            return driver.audit_case(case)
        if args.command == "run":
            return driver.run_case(case)
        if sweep is None:
            param = case.sweep.get("param")
            values = case.sweep.get("values") or []
            if not param or not values:
                raise ConfigError("sweep needs --param NAME=a..b or a sweep section in the case file")
            sweep = (param, list(values))
        status, _ = driver.run_sweep(args.case_file, overrides, sweep[0], sweep[1], args.out)
        return status
    except ConfigError as error:
        logger.error("Configuration error: %s", error)
        return EXIT_CONFIG
    except StateError as error:
        logger.error("Invalid state: %s", error)
        return EXIT_STATE
    except MeshError as error:
        logger.error("Mesh error: %s", error)
        if case is not None and case.equation == "nse3d" and not case.mesh.get("file"):
            return EXIT_CONFIG
        return EXIT_IO
    except OSError as error:
        logger.error("I/O error: %s", error)
        return EXIT_IO
    except DGSEMError as error:
        logger.error("Solver error: %s", error)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface: experiment subcommands and a ``git config`` like editor for the user defaults."""

from __future__ import annotations

import json
import logging
import os
import re
import subprocess
import sys
from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional

from . import __version__
from .config import SCHEMA_PATH, LabSettings, defaults_path, effective_settings, settings_from_defaults
from .runner import ExperimentConfig, RunManifest, run
from .validation import InvalidConfigError, LabDefaults, PreconditionError, schema_entries, value_pattern

_log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_SET = 1
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_ACCEPTANCE = 4

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# (flags, action, help) of the mutually exclusive config actions
_CONFIG_ACTIONS = (
    (("-l", "--list"), "list", "List the defaults set in the file."),
    (("--effective",), "effective", "List every run option with the value experiments use and its origin."),
    (("-e", "--edit"), "edit", "Open the defaults file in the editor and validate it afterwards."),
    (("--unset",), "unset", "Remove the default NAME from the file."),
    (("--unset-all",), "unset_all", "Remove all defaults from the file."),
    (("--list-valid-options",), "schema", "List the valid options and the value pattern of each."),
)


class _SectionOption(NamedTuple):
    """Represents the section and name of an option."""

    section: str
    option: str

    @classmethod
    def from_dot_notation(cls, name: str) -> _SectionOption:
        """Parse the passed option into section and option name.

        Args:
            name: name of the option together with the section in the format of SECTION.OPTION

        Raises:
            PreconditionError: if the passed name is not matching the expected format
        """
        match = re.match(r"^(?P<section>\w+)\.(?P<option>\w+)$", name)
        if match is None:
            raise PreconditionError(f"Invalid name format. Valid format is 'section.option', but got '{name}'.")
        return cls(**match.groupdict())

    def __str__(self) -> str:
        return f"{self.section}.{self.option}"


def _add_config_arguments(parser: ArgumentParser) -> None:
    parser.add_argument(
        "name", nargs="?", help="Name of the default to get or set in 'section.option' format, e.g. run.workers."
    )
    parser.add_argument("value", nargs="?", help="Value of the default to set.")
    actions = parser.add_argument_group("Actions").add_mutually_exclusive_group()
    for flags, action, help_text in _CONFIG_ACTIONS:
        actions.add_argument(*flags, dest="action", action="store_const", const=action, help=help_text)


def config_action(args: Namespace) -> str:
    """Resolve the config action: a bare name reads, a name and a value write, no arguments lists.

    Raises:
        PreconditionError: if positionals do not fit the selected action
    """
    if args.action is None:
        if args.name is None:
            return "list"
        return "get" if args.value is None else "set"
    if args.value is not None or (args.name is not None) != (args.action == "unset"):
        usage = "exactly one NAME" if args.action == "unset" else "no NAME or VALUE"
        raise PreconditionError(f"The {args.action.replace('_', '-')} action takes {usage}.")
    return args.action


class ConfigCommand:
    """The ``config`` subcommand over the defaults that seed the run options of every experiment."""

    def __init__(self, defaults: LabDefaults, settings: LabSettings) -> None:
        self._defaults = defaults
        self._settings = settings
        self._actions: Dict[str, Callable[[Namespace], int]] = {
            "get": self._get,
            "set": self._set,
            "unset": self._unset,
            "unset_all": self._unset_all,
            "list": self._list,
            "effective": self._effective,
            "schema": self._schema,
            "edit": self._edit,
        }

    def __call__(self, args: Namespace) -> int:
        """Run the selected action and return the exit code.

        Raises:
            InvalidConfigError: for names or values outside the schema; the file is left unchanged
            PreconditionError: for malformed names or conflicting arguments
        """
        return self._actions[config_action(args)](args)

    def _name(self, args: Namespace) -> _SectionOption:
        """Parsed NAME, checked against the schema."""
        name = _SectionOption.from_dot_notation(args.name)
        value_pattern(self._defaults.schema, name.section, name.option)
        return name

    def _get(self, args: Namespace) -> int:
        name = self._name(args)
        if self._defaults.has_option(*name):
            print(self._defaults.get(*name))
            return EXIT_OK
        effective = effective_settings(self._settings, self._defaults)
        used = {(section, option): value for section, option, value, _ in effective}
        _log.error("%s is not set; runs use %s", name, used.get(name, "no value"))
        return EXIT_NOT_SET

    def _set(self, args: Namespace) -> int:
        name = self._name(args)
        self._defaults.set_value(name.section, name.option, args.value)
        _log.info("Saved %s = %s to %s", name, args.value, self._defaults.path)
        return EXIT_OK

    def _unset(self, args: Namespace) -> int:
        name = self._name(args)
        if not self._defaults.unset_value(*name):
            _log.error("%s is not set in %s", name, self._defaults.path)
            return EXIT_NOT_SET
        return EXIT_OK

    def _unset_all(self, args: Namespace) -> int:
        self._defaults.unset_all()
        return EXIT_OK

    def _list(self, args: Namespace) -> int:
        for section, option, value in self._defaults.entries():
            print(f"{section}.{option}={value}")
        return EXIT_OK

    def _effective(self, args: Namespace) -> int:
        for section, option, value, origin in effective_settings(self._settings, self._defaults):
            print(f"{section}.{option}={value}  ({origin})")
        return EXIT_OK

    def _schema(self, args: Namespace) -> int:
        for section, option, pattern in schema_entries(self._defaults.schema):
            print(f"{section.strip('^$')}.{option.strip('^$')}  {pattern}")
        return EXIT_OK

    def _edit(self, args: Namespace) -> int:
        """Open the defaults file in VISUAL, then EDITOR, then vim, and validate the result.

        Raises:
            InvalidConfigError: if the edited file does not match the schema
        """
        editor = os.getenv("VISUAL") or os.getenv("EDITOR") or "vim"
        subprocess.run([editor, self._defaults.path])
        self._defaults.reload()
        return EXIT_OK


def _common_parser(settings: LabSettings) -> ArgumentParser:
    parser = ArgumentParser(add_help=False)
    group = parser.add_argument_group("Run options")
    group.add_argument(
        "--seed", dest="master_seed", type=int, default=settings.run.master_seed, help="Master seed (64-bit unsigned)."
    )
    group.add_argument("--workers", type=int, default=settings.run.workers, help="Worker processes.")
    group.add_argument(
        "--output-dir", dest="output_dir", type=Path, default=settings.output.directory, help="Directory for results."
    )
    group.add_argument(
        "--format",
        dest="output_format",
        choices=("csv", "json"),
        default=settings.output.format,
        help="Format of the per-trial data files.",
    )
    group.add_argument("-v", "--verbose", action="count", default=0, help="More log output; repeat for debug.")
    group.add_argument("-q", "--quiet", action="count", default=0, help="Less log output.")
    return parser


def build_parser(settings: LabSettings, defaults_file: Path) -> ArgumentParser:
    """Create the main parser; run options default to the effective settings."""
    parser = ArgumentParser(prog="belyilab", description="Random Belyi surfaces laboratory.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    common = _common_parser(settings)

    simulate = subparsers.add_parser("simulate", parents=[common], help="Sample oriented graphs and record faces.")
    simulate.add_argument("--n", type=int, required=True, help="Number of vertices.")
    simulate.add_argument("--k", type=int, default=3, help="Vertex degree.")
    simulate.add_argument("--trials", type=int, required=True, help="Number of sampled graphs.")
    simulate.add_argument("--simple", action="store_true", help="Reject graphs with loops or multiple edges.")
    simulate.add_argument(
        "--cycles", type=int, default=0, metavar="MAX_LEN", help="Count cycles of length 1..MAX_LEN in every graph."
    )
    simulate.add_argument(
        "--export-graphs", action="store_true", help="Write the edge list of every graph to OUTPUT_DIR/graphs."
    )

    mixing = subparsers.add_parser("mixing", parents=[common], help="Exact face permutation law and its bound.")
    mixing.add_argument("--N", type=int, required=True, help="Number of half-edges.")
    mixing.add_argument("--k", type=int, default=3, help="Vertex degree.")
    mixing.add_argument("--trials", type=int, help="Also estimate the law from this many Monte Carlo samples.")

    character = subparsers.add_parser("character", parents=[common], help="Character table or table check.")
    character.add_argument("--N", type=int, required=True, help="Size of the symmetric group.")
    character.add_argument(
        "--table1",
        "--codegree-table",
        dest="codegree_table",
        action="store_true",
        help="Check the character table of the low-dimensional representations.",
    )

    pd_compare = subparsers.add_parser(
        "pd-compare", parents=[common], help="Compare ranked face masses with Poisson-Dirichlet masses."
    )
    pd_compare.add_argument("--n", type=int, required=True, help="Number of vertices.")
    pd_compare.add_argument("--k", type=int, default=3, help="Vertex degree.")
    pd_compare.add_argument("--trials", type=int, required=True, help="Number of sampled graphs.")
    pd_compare.add_argument("--theta", type=float, default=1.0, help="Poisson-Dirichlet parameter.")

    spectrum = subparsers.add_parser("spectrum", parents=[common], help="Adjacency spectra against Kesten-McKay.")
    spectrum.add_argument("--n", type=int, required=True, help="Number of vertices.")
    spectrum.add_argument("--k", type=int, default=3, help="Vertex degree.")
    spectrum.add_argument("--graphs", type=int, default=50, help="Number of sampled graphs.")
    spectrum.add_argument("--bins", type=int, default=40, help="Histogram bins.")

    bounds = subparsers.add_parser("bounds", parents=[common], help="Dimension and character bound sweeps.")
    bounds.add_argument("--N", type=int, required=True, help="Size of the symmetric group.")
    bounds.add_argument("--k", type=int, default=3, help="Rim hook length.")
    bounds.add_argument("--m", type=int, default=4, help="Margin of the restricted dimension sum.")
    bounds.add_argument("--t", default="1/3", help="Exponent of the restricted dimension sum, e.g. 1/3.")
    bounds.add_argument("--r-max", dest="r_max", type=int, default=500, help="Largest r of the partition count sweep.")

    verify = subparsers.add_parser("verify", parents=[common], help="Run the acceptance suite.")
    verify.add_argument(
        "--scale", choices=("quick", "full"), default=settings.verify.scale, help="Trial counts of the suite."
    )

    config = subparsers.add_parser(
        "config",
        help="Get and set the user defaults.",
        description=f"Get and set the run option defaults kept in {defaults_file}",
    )
    _add_config_arguments(config)
    return parser


def experiment_config(args: Namespace) -> ExperimentConfig:
    """Experiment configuration from parsed arguments."""
    values = {field: getattr(args, field) for field in ExperimentConfig._fields if hasattr(args, field)}
    return ExperimentConfig(**values)


def _setup_logging(verbosity: int) -> None:
    levels = (logging.ERROR, logging.WARNING, logging.INFO, logging.DEBUG)
    logging.basicConfig(level=levels[max(0, min(2 + verbosity, 3))], format=LOG_FORMAT, stream=sys.stderr)


def _report_error(kind: str, error: Exception) -> None:
    _log.error(error)
    print(json.dumps({"error": kind, "message": str(error)}), file=sys.stderr)


def _print_summary(manifest: RunManifest) -> None:
    summary = {"command": manifest.command, "files": list(manifest.files), "wall_time": manifest.wall_time}
    if manifest.criteria:
        summary["criteria"] = manifest.criteria
        summary["passed"] = manifest.passed
    print(json.dumps(summary, indent=2))


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the ``belyilab`` script; returns the process exit code."""
    try:
        defaults = LabDefaults(defaults_file=defaults_path(), schema_file=SCHEMA_PATH)
    except InvalidConfigError as e:
        _report_error("validation", e)
        return EXIT_VALIDATION

    settings = settings_from_defaults(defaults)
    args = build_parser(settings, defaults.path).parse_args(argv)
    _setup_logging(getattr(args, "verbose", 0) - getattr(args, "quiet", 0))

    try:
        if args.command == "config":
            return ConfigCommand(defaults, settings)(args)
        manifest = run(experiment_config(args))
    except (PreconditionError, InvalidConfigError) as e:
        _report_error("validation", e)
        return EXIT_VALIDATION
    except OSError as e:
        _report_error("io", e)
        return EXIT_IO

    _print_summary(manifest)
    if manifest.command == "verify" and not manifest.passed:
        _log.error("Acceptance suite failed: %s", ", ".join(name for name, ok in manifest.criteria.items() if not ok))
        return EXIT_ACCEPTANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

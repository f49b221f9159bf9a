"""User defaults loading."""

import os
from pathlib import Path
from typing import Iterator, NamedTuple, Optional, Tuple, Union

from .validation import LabDefaults

_PKG_ROOT = Path(__file__).parent

USER_DEFAULTS_PATH = Path.home() / ".config/belyilab/defaults"
SCHEMA_PATH = _PKG_ROOT / "schema"

DEFAULT_MASTER_SEED = 0
DEFAULT_WORKERS = 1
DEFAULT_OUTPUT_DIRECTORY = "belyilab-results"
DEFAULT_FORMAT = "csv"
DEFAULT_SCALE = "quick"


class RunSettings(NamedTuple):
    master_seed: int
    workers: int


class OutputSettings(NamedTuple):
    directory: Path
    format: str


class VerifySettings(NamedTuple):
    scale: str


class LabSettings(NamedTuple):
    run: RunSettings
    output: OutputSettings
    verify: VerifySettings


def defaults_path() -> Path:
    """Location of the defaults file, ``BELYILAB_CONFIG`` if set."""
    return Path(os.getenv("BELYILAB_CONFIG") or USER_DEFAULTS_PATH)


def load_settings(path: Optional[Union[Path, str]] = None) -> LabSettings:
    """Read and validate the defaults file.

    Raises:
        InvalidConfigError: if the file does not match the schema
    """
    return settings_from_defaults(LabDefaults(defaults_file=path or defaults_path(), schema_file=SCHEMA_PATH))


def settings_from_defaults(defaults: LabDefaults) -> LabSettings:
    """Typed settings from validated defaults; missing options fall back to built-in values.

    The output directory honours ``BELYILAB_OUTPUT_DIR`` over the file.
    """
    return LabSettings(
        run=RunSettings(
            master_seed=defaults.getint(section="run", option="master_seed", fallback=DEFAULT_MASTER_SEED),
            workers=defaults.getint(section="run", option="workers", fallback=DEFAULT_WORKERS),
        ),
        output=OutputSettings(
            directory=Path(
                os.getenv("BELYILAB_OUTPUT_DIR")
                or defaults.get(section="output", option="directory", fallback=DEFAULT_OUTPUT_DIRECTORY)
            ),
            format=defaults.get(section="output", option="format", fallback=DEFAULT_FORMAT),
        ),
        verify=VerifySettings(scale=defaults.get(section="verify", option="scale", fallback=DEFAULT_SCALE)),
    )


def effective_settings(settings: LabSettings, defaults: LabDefaults) -> Iterator[Tuple[str, str, str, str]]:
    """Section, option, value and origin of every run option the experiments will use.

    The origin is ``file`` for values from the defaults file, ``env`` for environment overrides and ``built-in``
    otherwise. Section and option names are the schema names.
    """
    for section, group in settings._asdict().items():
        for option, value in group._asdict().items():
            if section == "output" and option == "directory" and os.getenv("BELYILAB_OUTPUT_DIR"):
                origin = "env"
            elif defaults.has_option(section, option):
                origin = "file"
            else:
                origin = "built-in"
            yield section, option, str(value), origin

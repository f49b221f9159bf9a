"""Validation of the defaults file, of operation preconditions and of computed invariants."""

import re
from configparser import ConfigParser
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Tuple, Union


class InvalidConfigError(Exception):
    """Base invalid defaults-file exception. Specific exception classes should inherit from this."""

    pass


class InvalidSectionError(InvalidConfigError):
    """Exception to raise if an unknown section name is found in the defaults file."""

    def __init__(self, section: str, valid_sections: List[str]) -> None:
        """Build the error message.

        Args:
            section: name of the section
            valid_sections: list of valid section patterns
        """
        super().__init__(f'Unknown section "{section}"; section patterns: {", ".join(valid_sections)}.')


class InvalidOptionError(InvalidConfigError):
    """Exception to raise if a valid section has an unknown option."""

    def __init__(self, section: str, option: str, valid_options: List[str]) -> None:
        """Build the error message.

        Args:
            section: section name
            option: option name
            valid_options: list of valid option patterns in the given section
        """
        super().__init__(f'Unknown option "{option}" in "{section}"; option patterns: {", ".join(valid_options)}.')


class InvalidValueError(InvalidConfigError):
    """Exception to raise if a valid option has a value outside its schema."""

    def __init__(self, section: str, option: str, value: str, valid_value: str) -> None:
        """Build the error message.

        Args:
            section: section name
            option: option name
            value: option value
            valid_value: regexp pattern that needs to match the provided value
        """
        super().__init__(
            f'"{value}" is not a valid value for "{section}.{option}". '
            f'Expected a match for the pattern "{valid_value}".'
        )


class PreconditionError(ValueError):
    """Rejected input: an operation was called outside its precondition."""

    def __init__(self, constraint: str) -> None:
        """Keep the violated constraint for machine-readable reporting.

        Args:
            constraint: human readable statement of the violated constraint
        """
        super().__init__(constraint)
        self.constraint = constraint


class InvariantViolationError(RuntimeError):
    """A computed quantity broke an invariant that holds for correct code."""

    pass


class QuadratureError(ArithmeticError):
    """Numerical integration did not reach the requested accuracy."""

    def __init__(self, what: str, achieved: float, requested: float) -> None:
        super().__init__(f"{what}: achieved error estimate {achieved:.3e}, requested {requested:.3e}")
        self.achieved = achieved
        self.requested = requested


def require(condition: bool, constraint: str) -> None:
    """Raise PreconditionError naming the constraint if the condition does not hold."""
    if not condition:
        raise PreconditionError(constraint)


def _first_match(name: str, patterns: Iterable[str]) -> Optional[str]:
    return next((pattern for pattern in patterns if re.match(pattern, name)), None)


def value_pattern(schema: ConfigParser, section: str, option: str) -> str:
    """Value pattern the schema assigns to ``section.option``.

    Raises:
        InvalidSectionError: if no section pattern matches the section name
        InvalidOptionError: if no option pattern of the matched section matches the option name
    """
    section_pattern = _first_match(section, schema.sections())
    if section_pattern is None:
        raise InvalidSectionError(section, schema.sections())
    option_patterns = schema.options(section_pattern)
    option_pattern = _first_match(option, option_patterns)
    if option_pattern is None:
        raise InvalidOptionError(section, option, option_patterns)
    return schema.get(section_pattern, option_pattern, raw=True)


def check_value(schema: ConfigParser, section: str, option: str, value: str) -> None:
    """Raise the matching InvalidConfigError unless ``section.option = value`` is allowed by the schema."""
    pattern = value_pattern(schema, section, option)
    if not re.match(pattern, value):
        raise InvalidValueError(section, option, value, pattern)


def schema_entries(schema: ConfigParser) -> Iterator[Tuple[str, str, str]]:
    """Section, option and value patterns of the schema in file order."""
    for section in schema.sections():
        for option in schema.options(section):
            yield section, option, schema.get(section, option, raw=True)


def validate_defaults(defaults: ConfigParser, schema: ConfigParser) -> None:
    """Check every section, option and value of the defaults against the regex schema.

    Raises:
        InvalidConfigError: for the first entry the schema does not allow
    """
    for section in defaults.sections():
        if _first_match(section, schema.sections()) is None:
            raise InvalidSectionError(section, schema.sections())
        for option, value in defaults.items(section, raw=True):
            check_value(schema, section, option, value)


class LabDefaults(ConfigParser):
    """User defaults for experiment runs, loaded from an INI file and validated against the package schema.

    Every edit goes through the schema before the file is rewritten, so the file on disk is always valid.
    """

    def __init__(self, defaults_file: Union[Path, str], schema_file: Union[Path, str], **kwargs) -> None:
        """Load and validate the defaults.

        Args:
            defaults_file: path to the defaults file; a missing file means empty defaults
            schema_file: path to the schema file used for validation
            **kwargs: keyword arguments passed to the underlying ConfigParser initialization
        """
        super().__init__(**kwargs)
        self._defaults_file = Path(defaults_file)
        self.read(defaults_file)
        self._schema = self._get_schema(schema_file)
        self._validate()

    @property
    def path(self) -> Path:
        return self._defaults_file

    @property
    def schema(self) -> ConfigParser:
        return self._schema

    @staticmethod
    def _get_schema(schema_file: Union[Path, str]) -> ConfigParser:
        """Read schema file.

        Raises:
            ValueError: if the provided path doesn't point to an existing file
        """
        schema = ConfigParser(inline_comment_prefixes=["#"])
        if not schema.read(schema_file):
            raise ValueError(f"The schema_file should point to an existing file, but none found at {schema_file}")
        return schema

    def _validate(self) -> None:
        """Validate self based on the schema."""
        validate_defaults(self, self._schema)

    def entries(self) -> Iterator[Tuple[str, str, str]]:
        """Section, option and value of every default set in the file."""
        for section in self.sections():
            for option, value in self.items(section, raw=True):
                yield section, option, value

    def set_value(self, section: str, option: str, value: str) -> None:
        """Set one default and save.

        Raises:
            InvalidConfigError: if the schema does not allow the value; nothing is changed
        """
        check_value(self._schema, section, option, value)
        if not self.has_section(section):
            self.add_section(section)
        self.set(section, option, value)
        self.save()

    def unset_value(self, section: str, option: str) -> bool:
        """Remove one default and save; a section left empty is removed too.

        Returns:
            False if the default was not set
        """
        if not self.has_option(section, option):
            return False
        self.remove_option(section, option)
        if not self.options(section):
            self.remove_section(section)
        self.save()
        return True

    def unset_all(self) -> None:
        for section in self.sections():
            self.remove_section(section)
        self.save()

    def reload(self) -> None:
        """Read the file again, e.g. after an external edit, and validate it."""
        for section in self.sections():
            self.remove_section(section)
        self.read(self._defaults_file)
        self._validate()

    def save(self) -> None:
        """Validate and dump the defaults to the file."""
        self._validate()
        self._defaults_file.parent.mkdir(parents=True, exist_ok=True)
        with self._defaults_file.open("w") as f:
            self.write(f)

#!/usr/bin/env python3
"""Test the validation module."""

import tempfile
import unittest
from configparser import ConfigParser
from pathlib import Path
from unittest.mock import create_autospec, patch, MagicMock, Mock

from belyilab.config import SCHEMA_PATH
from belyilab.validation import (
    InvalidConfigError,
    InvalidOptionError,
    InvalidSectionError,
    InvalidValueError,
    LabDefaults,
    PreconditionError,
    QuadratureError,
    check_value,
    require,
    schema_entries,
    validate_defaults,
    value_pattern,
)


class TestValidateDefaults(unittest.TestCase):
    """Test the defaults validation functions."""

    def setUp(self) -> None:
        self.schema = ConfigParser(inline_comment_prefixes=["#"])
        self.schema.read_string(
            "[^run$]\n^workers$ = ^[1-9]\\d{0,2}$\n^master_.*$ = ^\\d+$\n\n[^out.*t$]\n^format$ = ^(csv|json)$\n"
        )

    def test_value_pattern(self) -> None:
        """Test the value_pattern function.

        GIVEN a schema with regex section and option names,
        WHEN looking up known and unknown names,
        THEN known names should give the value pattern of the first matching option,
            AND an unknown section or option should raise the matching InvalidConfigError.
        """
        # Run and assert.
        self.assertEqual(value_pattern(self.schema, "run", "master_seed"), r"^\d+$")
        self.assertEqual(value_pattern(self.schema, "output", "format"), "^(csv|json)$")
        with self.assertRaises(InvalidSectionError) as cm:
            value_pattern(self.schema, "runs", "workers")
        self.assertIn('Unknown section "runs"', str(cm.exception))
        with self.assertRaises(InvalidOptionError) as cm:
            value_pattern(self.schema, "run", "seed")
        self.assertIn("^workers$, ^master_.*$", str(cm.exception))

    def test_check_value(self) -> None:
        """Test the check_value function.

        GIVEN the workers option limited to 1..999,
        WHEN checking several values,
        THEN only the value inside the pattern should pass,
            AND the others should raise InvalidValueError naming the value and the option.
        """
        for value in ["0", "12", "1000"]:
            with self.subTest(value=value):
                # Run and assert.
                if value == "12":
                    check_value(self.schema, "run", "workers", value)
                else:
                    with self.assertRaises(InvalidValueError) as cm:
                        check_value(self.schema, "run", "workers", value)
                    self.assertIn(f'"{value}" is not a valid value for "run.workers"', str(cm.exception))

    def test_schema_entries(self) -> None:
        """Test that schema_entries lists the patterns in file order."""
        self.assertEqual(
            list(schema_entries(self.schema)),
            [
                ("^run$", "^workers$", r"^[1-9]\d{0,2}$"),
                ("^run$", "^master_.*$", r"^\d+$"),
                ("^out.*t$", "^format$", "^(csv|json)$"),
            ],
        )

    def test_validate_defaults_against_package_schema(self) -> None:
        """Test the validate_defaults function with the schema shipped in the package.

        GIVEN the package schema,
            AND several defaults objects.
        WHEN calling the validate_defaults function with them,
        THEN complete or partial defaults inside the schema should pass,
            AND unknown sections, unknown options or malformed values should raise InvalidConfigError.
        """
        # Setup environment.
        schema = ConfigParser(inline_comment_prefixes=["#"])
        schema.read(SCHEMA_PATH)

        empty = ConfigParser()

        complete = ConfigParser()
        complete["run"] = {"master_seed": "18446744073709551615", "workers": "8"}
        complete["output"] = {"directory": "/tmp/belyi results", "format": "json"}
        complete["verify"] = {"scale": "full"}

        bad_seed = ConfigParser()
        bad_seed["run"] = {"master_seed": "-1"}

        bad_format = ConfigParser()
        bad_format["output"] = {"format": "xlsx"}

        unknown_option = ConfigParser()
        unknown_option["run"] = {"threads": "4"}

        unknown_section = ConfigParser()
        unknown_section["plot"] = {"format": "csv"}

        defaults_sequence = [empty, complete, bad_seed, bad_format, unknown_option, unknown_section]
        ok_sequence = [True, True, False, False, False, False]

        for defaults, ok in zip(defaults_sequence, ok_sequence):
            with self.subTest(sections=defaults.sections()):
                # Run and assert.
                if ok:
                    validate_defaults(defaults, schema)
                else:
                    with self.assertRaises(InvalidConfigError):
                        validate_defaults(defaults, schema)


class TestRequire(unittest.TestCase):
    """Test the precondition and numerical error helpers."""

    def test_require(self) -> None:
        """Test the require function.

        GIVEN a condition and a constraint text,
        WHEN calling require with them,
        THEN nothing should happen for a true condition,
            AND PreconditionError carrying the constraint should be raised for a false one,
            AND the error should also be a ValueError.
        """
        # Run.
        require(True, "never raised")
        with self.assertRaises(ValueError) as cm:
            require(False, "k must divide N")

        # Assert.
        self.assertIsInstance(cm.exception, PreconditionError)
        self.assertEqual(cm.exception.constraint, "k must divide N")
        self.assertEqual(str(cm.exception), "k must divide N")

    def test_quadrature_error_message(self) -> None:
        """Test the QuadratureError message.

        GIVEN an achieved and a requested error,
        WHEN creating a QuadratureError,
        THEN both should be kept and shown in the message.
        """
        # Run.
        error = QuadratureError("tail integral", 2e-6, 1e-8)

        # Assert.
        self.assertEqual(error.achieved, 2e-6)
        self.assertEqual(error.requested, 1e-8)
        self.assertEqual(str(error), "tail integral: achieved error estimate 2.000e-06, requested 1.000e-08")


class TestLabDefaults(unittest.TestCase):
    """Test the LabDefaults class."""

    @patch.object(LabDefaults, "_validate")
    @patch.object(LabDefaults, "_get_schema")
    @patch("belyilab.validation.ConfigParser.read")
    @patch("belyilab.validation.ConfigParser.__init__")
    def test_init(
        self, mock_parent_init: MagicMock, mock_read: MagicMock, mock_get_schema: MagicMock, mock_validate: MagicMock
    ) -> None:
        """Test the initialization of the class.

        WHEN creating a LabDefaults object,
        THEN it should call the parent __init__ with the extra keyword arguments,
            AND it should call the read method of the parent with the defaults_file argument,
            AND it should call the _get_schema method with the schema_file argument,
            AND then it should call the _validate method,
            AND the _schema attribute of the created object should be the returned object from the _get_schema call.
        """
        # Setup environment.
        argument_sequence = [
            {"defaults_file": "/some/defaults", "schema_file": create_autospec(Path)},
            {"defaults_file": "/some/defaults", "schema_file": create_autospec(Path), "first": 5, "second": Mock()},
        ]

        for kwargs in argument_sequence:
            with self.subTest(**kwargs):
                # Run.
                defaults = LabDefaults(**kwargs)

                # Assert.
                mock_parent_init.assert_called_once_with(
                    **{key: value for key, value in kwargs.items() if key not in ["defaults_file", "schema_file"]}
                )
                mock_read.assert_called_once_with(kwargs["defaults_file"])
                mock_get_schema.assert_called_once_with(kwargs["schema_file"])
                self.assertEqual(defaults._schema, mock_get_schema.return_value)
                self.assertEqual(defaults._defaults_file, Path(kwargs["defaults_file"]))
                mock_validate.assert_called_once_with()

            # Reset mocks.
            mock_parent_init.reset_mock()
            mock_read.reset_mock()
            mock_get_schema.reset_mock()
            mock_validate.reset_mock()

    def test_get_schema_missing_file(self) -> None:
        """Test the _get_schema method with a path that does not exist.

        GIVEN a path with no file behind it,
        WHEN calling _get_schema with it,
        THEN it should raise ValueError naming the path.
        """
        # Run and assert.
        with self.assertRaises(ValueError) as cm:
            LabDefaults._get_schema("/no/such/schema")
        self.assertIn("/no/such/schema", str(cm.exception))

    @patch.object(LabDefaults, "__init__", lambda *_: None)
    @patch("belyilab.validation.validate_defaults")
    def test_validate(self, mock_validate_defaults: MagicMock) -> None:
        """Test the _validate method.

        GIVEN a LabDefaults object
        WHEN calling the _validate method on it
        THEN it should call the validate_defaults function with the object and its _schema attribute.
        """
        # Setup environment.
        defaults = LabDefaults()
        defaults._schema = ConfigParser()

        # Run.
        defaults._validate()

        # Assert.
        mock_validate_defaults.assert_called_once_with(defaults, defaults._schema)

    def test_save_round_trip(self) -> None:
        """Test the save method on a real file.

        GIVEN a LabDefaults object over a missing file in a temporary directory,
        WHEN setting an option and saving,
        THEN the parent directory should be created,
            AND a fresh LabDefaults over the same file should read the option back.
        """
        with tempfile.TemporaryDirectory() as directory:
            # Setup environment.
            path = Path(directory) / "nested" / "defaults"
            defaults = LabDefaults(defaults_file=path, schema_file=SCHEMA_PATH)
            defaults.add_section("run")
            defaults.set("run", "workers", "4")

            # Run.
            defaults.save()

            # Assert.
            self.assertTrue(path.is_file())
            reloaded = LabDefaults(defaults_file=path, schema_file=SCHEMA_PATH)
            self.assertEqual(reloaded.getint("run", "workers"), 4)

    def test_save_rejects_invalid_value(self) -> None:
        """Test that save validates before writing.

        GIVEN a LabDefaults object over a missing file,
            AND an option set to a value outside the schema,
        WHEN calling save,
        THEN InvalidValueError should be raised,
            AND no file should be written.
        """
        with tempfile.TemporaryDirectory() as directory:
            # Setup environment.
            path = Path(directory) / "defaults"
            defaults = LabDefaults(defaults_file=path, schema_file=SCHEMA_PATH)
            defaults.add_section("verify")
            defaults.set("verify", "scale", "huge")

            # Run and assert.
            with self.assertRaises(InvalidValueError):
                defaults.save()
            self.assertFalse(path.exists())

    def test_set_and_unset_value(self) -> None:
        """Test set_value, unset_value and entries on a real file.

        GIVEN LabDefaults over a missing file,
        WHEN setting two run options, unsetting them one after the other and unsetting again,
        THEN entries should list what is set,
            AND the run section should disappear with its last option,
            AND unsetting a missing option should return False.
        """
        with tempfile.TemporaryDirectory() as directory:
            # Setup environment.
            path = Path(directory) / "defaults"
            defaults = LabDefaults(defaults_file=path, schema_file=SCHEMA_PATH)

            # Run.
            defaults.set_value("run", "workers", "4")
            defaults.set_value("run", "master_seed", "7")
            listed = list(defaults.entries())
            first = defaults.unset_value("run", "workers")
            kept = defaults.has_section("run")
            second = defaults.unset_value("run", "master_seed")
            again = defaults.unset_value("run", "master_seed")

            # Assert.
            self.assertEqual(listed, [("run", "workers", "4"), ("run", "master_seed", "7")])
            self.assertEqual((first, kept, second, again), (True, True, True, False))
            self.assertEqual(defaults.sections(), [])
            self.assertEqual(LabDefaults(defaults_file=path, schema_file=SCHEMA_PATH).sections(), [])

    def test_set_value_rejects_value_outside_schema(self) -> None:
        """Test that set_value checks before touching memory or file.

        GIVEN LabDefaults over a file holding output.format = csv,
        WHEN setting the format to xlsx and an unknown option,
        THEN InvalidValueError and InvalidOptionError should be raised,
            AND both the object and the file should still hold csv.
        """
        with tempfile.TemporaryDirectory() as directory:
            # Setup environment.
            path = Path(directory) / "defaults"
            path.write_text("[output]\nformat = csv\n")
            defaults = LabDefaults(defaults_file=path, schema_file=SCHEMA_PATH)

            # Run and assert.
            with self.assertRaises(InvalidValueError):
                defaults.set_value("output", "format", "xlsx")
            with self.assertRaises(InvalidOptionError):
                defaults.set_value("output", "colour", "red")
            self.assertEqual(defaults.get("output", "format"), "csv")
            self.assertIn("format = csv", path.read_text())

    def test_unset_all_and_reload(self) -> None:
        """Test unset_all and reload.

        GIVEN LabDefaults over a file with two sections,
        WHEN clearing everything, then editing the file behind its back and reloading,
        THEN the file should be empty after the clear,
            AND reload should pick up a valid edit and reject an invalid one.
        """
        with tempfile.TemporaryDirectory() as directory:
            # Setup environment.
            path = Path(directory) / "defaults"
            path.write_text("[run]\nworkers = 2\n\n[verify]\nscale = full\n")
            defaults = LabDefaults(defaults_file=path, schema_file=SCHEMA_PATH)

            # Run and assert 1.
            defaults.unset_all()
            self.assertEqual(path.read_text().strip(), "")

            # Run and assert 2.
            path.write_text("[verify]\nscale = quick\n")
            defaults.reload()
            self.assertEqual(list(defaults.entries()), [("verify", "scale", "quick")])

            # Run and assert 3.
            path.write_text("[verify]\nscale = huge\n")
            with self.assertRaises(InvalidValueError):
                defaults.reload()


if __name__ == "__main__":
    unittest.main()

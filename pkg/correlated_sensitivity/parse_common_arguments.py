import argparse
import logging
import tomllib

DEFAULT_VERSION = "0.0.0"


def read_version(pyproject_file: str = "pyproject.toml") -> str:
    """
    Read the package version from pyproject.toml.

    Args:
        pyproject_file (str): Path of the project manifest.

    Returns:
        str: The [tool.poetry] version, or 0.0.0 if it cannot be read.
    """
    try:
        with open(pyproject_file, "rb") as f:
            pyproject_data = tomllib.load(f)
    except (FileNotFoundError, tomllib.TOMLDecodeError):
        return DEFAULT_VERSION
    return (
        pyproject_data.get("tool", {})
        .get("poetry", {})
        .get("version", DEFAULT_VERSION)
    )


def parse_common_arguments(
    program_name: str, description: str, argv: list[str] | None = None
) -> argparse.ArgumentParser:
    """
    Parse common command-line arguments for the applications.

    Args:
        program_name (str): The name of the program/script
        description (str): The description to display in the argument parser
            help message.
        argv (list[str] | None): Arguments to inspect for --verbose;
            sys.argv when None.

    Returns:
        argparse.ArgumentParser: Configured argument parser with version and
            verbose options.
    """
    arg_parser = argparse.ArgumentParser(
        prog=program_name, description=description
    )
    arg_parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {read_version()}",
    )
    arg_parser.add_argument(
        "--verbose", action="store_true", help="increase verbosity"
    )
    verbose_parser = argparse.ArgumentParser(add_help=False)
    verbose_parser.add_argument("--verbose", action="store_true")
    args, _ = verbose_parser.parse_known_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO)
    return arg_parser

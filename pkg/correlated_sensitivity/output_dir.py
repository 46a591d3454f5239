"""
This module resolves where a campaign writes its files.

The --out flag wins, then the CORRELATED_SA_OUTPUT_DIR environment variable
(the only environment override), then output.dir from the configuration.
"""

import os

OUTPUT_DIR_VARIABLE = "CORRELATED_SA_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "results"


def resolve_output_dir(
    cli_value: str | None, config_value: str | None = None
) -> str:
    """
    Pick the output directory.

    Args:
        cli_value (str | None): Value of --out, if given.
        config_value (str | None): output.dir from the configuration.

    Returns:
        str: The directory to write into.
    """
    if cli_value:
        return cli_value
    if env_value := os.getenv(OUTPUT_DIR_VARIABLE):
        return env_value
    return config_value or DEFAULT_OUTPUT_DIR

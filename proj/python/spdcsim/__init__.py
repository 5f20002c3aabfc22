"""Cavity-enhanced entangled photon pair source simulator."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_command as _run_command_raw


def run_command(command, config, out_dir, input_path=None):
    """Run one named pipeline and return the report as a dict."""
    return _json.loads(_run_command_raw(command, config, out_dir, input_path))

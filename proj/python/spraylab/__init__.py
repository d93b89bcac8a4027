"""Sprays, projective metrizability, formal integrability and geodesics."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, analyze as _analyze, involutivity as _involutivity, metrizable as _metrizable


def analyze(source, **kwargs):
    """Report of ``spraylab analyze`` as a dict."""
    return _json.loads(_analyze(source, **kwargs))


def metrizable(source, **kwargs):
    """Report of ``spraylab metrizable`` as a dict."""
    return _json.loads(_metrizable(source, **kwargs))


def involutivity(source, **kwargs):
    """Report of ``spraylab involutivity`` as a dict."""
    return _json.loads(_involutivity(source, **kwargs))

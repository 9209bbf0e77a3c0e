"""Numerical lab for the moment inequality E|X+Y|^r >= E|X-Y|^r."""

import json

from ._core import *  # noqa: F401,F403
from ._core import __version__, verify_json


def verify(document, r=(), method=None, mc_n=None, seed=None, workers=1):
    """Run the verification pipeline on a model file given as a path or JSON text.

    Returns (report dict, all verdicts as expected).
    """
    text = document
    if not document.lstrip().startswith("{"):
        with open(document, encoding="utf-8") as fh:
            text = fh.read()
    report, ok = verify_json(text, list(r), method, mc_n, seed, workers)
    return json.loads(report), ok

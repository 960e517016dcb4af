import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from welschinger.engine import Evaluator  # noqa: E402
from welschinger.surfaces import make_surface  # noqa: E402

_SPEC_CACHE = {}
_EVAL_CACHE = {}


def get_spec(model, a=0, b=0, twist="0", e_choice=None):
    key = (model, a, b, twist, e_choice)
    if key not in _SPEC_CACHE:
        _SPEC_CACHE[key] = make_surface(model, a, b, twist=twist, e_choice=e_choice)
    return _SPEC_CACHE[key]


def get_evaluator(model, a=0, b=0, twist="0", e_choice=None):
    """Session-shared evaluator; the memo is reused across test modules."""
    spec = get_spec(model, a, b, twist, e_choice)
    if spec.surface_id not in _EVAL_CACHE:
        _EVAL_CACHE[spec.surface_id] = Evaluator(spec)
    return spec, _EVAL_CACHE[spec.surface_id]


@pytest.fixture
def shared():
    return get_evaluator

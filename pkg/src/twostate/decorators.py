"""Decorators to register scenarios.

A scenario is a function that fills a :class:`ScenarioReport` from
validated parameters. The :func:`scenario` decorator takes care of
validating the raw parameters against a pydantic schema, converting
angles to radians and creating the report, so that only the scenario
body needs to be defined.
"""
import logging
import math
from collections import OrderedDict
from collections import namedtuple
from functools import wraps

import pydantic

from twostate.utils import ScenarioReport

SCENARIOS = OrderedDict()

ScenarioEntry = namedtuple('ScenarioEntry', ['name', 'schema', 'description', 'run'])

_LOGGER = logging.getLogger('twostate.decorators')


class ScenarioError(ValueError):
    """Unknown scenario or invalid scenario parameters."""


def validate_parameters(name, schema, parameters):
    """Validates raw parameters and returns them in canonical units.

    Angle fields listed in :code:`schema.angle_fields` that were given
    explicitly are converted from degrees to radians if the parameter
    'degrees' is true.

    Raises
    ------
    ScenarioError
        Naming the offending field and the reason.
    """
    try:
        validated = schema(**dict(parameters or {}))
    except pydantic.ValidationError as err:
        first = err.errors()[0]
        field = '.'.join(str(loc) for loc in first['loc']) or '<root>'
        raise ScenarioError('Invalid parameter {!r} for scenario {}: {}'.format(
            field, name, first['msg']))
    except TypeError as err:
        raise ScenarioError('Invalid parameters for scenario {}: {}'.format(name, err))
    canonical = OrderedDict(validated.model_dump())
    if canonical.pop('degrees', False):
        # defaults are given in radians already
        for field in getattr(schema, 'angle_fields', ()):
            if field in validated.model_fields_set and canonical.get(field) is not None:
                canonical[field] = math.radians(canonical[field])
    return canonical


def scenario(name, schema, description=''):
    """Scenario registration decorator

    This decorator registers the decorated function under the given
    name. The registered callable accepts raw parameters, validates
    them with :code:`schema` and returns the filled report.

    Parameters
    ----------
    name : str
        Scenario name used on the command line.
    schema : pydantic.BaseModel subclass
        Parameter schema; it may declare :code:`angle_fields`.
    description : str
        One line description.
    """
    def _scenario(func):
        @wraps(func)
        def _run(parameters=None):
            canonical = validate_parameters(name, schema, parameters)
            report = ScenarioReport(name, canonical, seed=canonical.get('seed', 0))
            _LOGGER.info('running scenario %s with %s', name, dict(canonical))
            func(canonical, report)
            return report
        if name in SCENARIOS:
            raise ScenarioError('Scenario {} registered twice.'.format(name))
        SCENARIOS[name] = ScenarioEntry(name, schema, description, _run)
        return _run
    return _scenario

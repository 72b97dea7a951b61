"""Utilities for twostate: output locations, reports and exporters."""

import io
import json
import logging
import math
import os
import sys
from collections import OrderedDict

import numpy as np
import pandas as pd

from twostate.version import version as __version__

SIGNIFICANT_DIGITS = 12
FORMATS = ('json', 'csv', 'text')


def _get_output_root_directory():
    """Function returns the output root directory."""
    if "TWOSTATE_OUTPUT" not in os.environ:  # pragma: no cover

        os.environ['TWOSTATE_OUTPUT'] = os.path.join(os.path.expanduser("~"),
                                                     'twostate_results')
        print('environment variable TWOSTATE_OUTPUT not set.'
              ' Will use TWOSTATE_OUTPUT={}'.format(os.environ['TWOSTATE_OUTPUT']),
              file=sys.stderr)
    return os.environ['TWOSTATE_OUTPUT']


def _configure_logging():
    """Directs all twostate log messages to <output root>/logs/twostate.log."""
    outputdir = _get_output_root_directory()
    if not os.path.exists(os.path.join(outputdir, 'logs')):
        os.makedirs(os.path.join(outputdir, 'logs'))

    logfile = os.path.join(outputdir, 'logs', 'twostate.log')
    logging.basicConfig(filename=logfile,
                        level=logging.DEBUG,
                        format='%(asctime)s:%(name)s:%(message)s',
                        datefmt='%m/%d/%Y %H:%M:%S')
    return logfile


def round_significant(value, digits=SIGNIFICANT_DIGITS):
    """Rounds a float to the given number of significant digits."""
    return float('{:.{}g}'.format(value, digits))


def _clean(obj):
    """Converts report content to plain, rounded JSON types."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return None
        return round_significant(float(obj))
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, pd.DataFrame):
        return _table(obj)
    if isinstance(obj, dict):
        return OrderedDict((str(key), _clean(value)) for key, value in obj.items())
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(value) for value in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _table(frame):
    return OrderedDict([
        ('columns', [str(column) for column in frame.columns]),
        ('rows', [[_clean(value) for value in row]
                  for row in frame.astype(object).values.tolist()]),
    ])


class ScenarioReport(object):
    """Deterministic report of a scenario or command.

    All content is stored in plain JSON types with floats rounded to
    12 significant digits, so serializing and parsing a report
    reproduces it exactly.

    Parameters
    ----------
    scenario : str
        Scenario or command name.
    parameters : dict
        Parameters echoed in canonical units (radians).
    seed : int
        Seed of the keyed random generator. Default: 0.
    """

    def __init__(self, scenario, parameters, seed=0, version=__version__):
        self.scenario = scenario
        self.version = version
        self.seed = int(seed)
        self.parameters = _clean(parameters)
        self.results = OrderedDict()
        self.verdicts = OrderedDict()
        self.tables = OrderedDict()
        self.notes = []
        self.primary_table = None

    def add_result(self, key, value):
        """Stores a numeric result section."""
        self.results[key] = _clean(value)

    def add_verdict(self, key, value):
        """Stores a boolean or textual verdict."""
        self.verdicts[key] = _clean(value)

    def add_table(self, name, frame, primary=False):
        """Stores a tabular section given as pandas.DataFrame."""
        self.tables[name] = _table(frame)
        if primary or self.primary_table is None:
            self.primary_table = name

    def add_note(self, text):
        """Appends a free-text note."""
        self.notes.append(text)

    def table(self, name):
        """Tabular section as pandas.DataFrame."""
        if name not in self.tables:
            raise ValueError('Report has no table {!r}; available: {}'.format(
                name, list(self.tables)))
        return pd.DataFrame(self.tables[name]['rows'], columns=self.tables[name]['columns'])

    def to_dict(self):
        """Report content with stable field ordering."""
        return OrderedDict([
            ('scenario', self.scenario),
            ('version', self.version),
            ('seed', self.seed),
            ('parameters', self.parameters),
            ('results', self.results),
            ('verdicts', self.verdicts),
            ('tables', self.tables),
            ('primary_table', self.primary_table),
            ('notes', self.notes),
        ])

    @classmethod
    def from_dict(cls, content):
        """Inverse of :meth:`to_dict`."""
        report = cls(content['scenario'], content['parameters'], content['seed'],
                     content['version'])
        report.results = _clean(content['results'])
        report.verdicts = _clean(content['verdicts'])
        report.tables = _clean(content['tables'])
        report.primary_table = content['primary_table']
        report.notes = list(content['notes'])
        return report

    def __eq__(self, other):
        return isinstance(other, ScenarioReport) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other


def _format_value(value):
    if isinstance(value, float):
        return '{:.12g}'.format(value)
    return str(value)


def _text_lines(content, indent=0):
    lines = []
    for key, value in content.items():
        prefix = ' ' * indent + '{}:'.format(key)
        if isinstance(value, dict):
            lines.append(prefix)
            lines.extend(_text_lines(value, indent + 2))
        elif isinstance(value, list):
            lines.append(prefix + ' ' + ', '.join(_format_value(item) for item in value))
        else:
            lines.append(prefix + ' ' + _format_value(value))
    return lines


class ExportJson(object):
    """Method that dumps a report as json.

    Parameters
    ----------
    filesuffix : str
        Target file ending. Default: 'json'.
    indent : int
        Indentation of the json document. Default: 2.
    """
    def __init__(self, filesuffix='json', indent=2):
        self.filesuffix = filesuffix
        self.indent = indent

    def render(self, report, table=None):  # pylint: disable=unused-argument
        """Report as json text."""
        return json.dumps(report.to_dict(), indent=self.indent) + '\n'

    def __call__(self, output_dir, name, report):
        filename = os.path.join(output_dir, name + '.' + self.filesuffix)
        with io.open(filename, 'w', encoding='utf8') as jsonfile:
            jsonfile.write(self.render(report))
        return filename


class ExportCsv(object):
    """Method that dumps the tabular section of a report as csv file.

    Parameters
    ----------
    filesuffix : str
        File ending. Default: 'csv'.
    sep : str
        Column separator. Default: ','.
    """
    def __init__(self, filesuffix='csv', sep=','):
        self.filesuffix = filesuffix
        self.sep = sep

    def render(self, report, table=None):
        """Selected table, or the report's primary table, as csv text."""
        name = table or report.primary_table
        if name is None:
            raise ValueError('Report {} has no tabular section for csv output.'.format(
                report.scenario))
        return report.table(name).to_csv(sep=self.sep, index=False,
                                         float_format='%.12g', lineterminator='\n')

    def __call__(self, output_dir, name, report, table=None):
        filename = os.path.join(output_dir, name + '.' + self.filesuffix)
        with io.open(filename, 'w', encoding='utf8') as csvfile:
            csvfile.write(self.render(report, table))
        return filename


class ExportText(object):
    """Method that dumps a human-readable report.

    Tables are rendered with pandas and mirror the json values.
    """
    def __init__(self, filesuffix='txt'):
        self.filesuffix = filesuffix

    def render(self, report, table=None):  # pylint: disable=unused-argument
        """Report as plain text."""
        content = report.to_dict()
        lines = ['scenario: {}'.format(content['scenario']),
                 'version: {}'.format(content['version']),
                 'seed: {}'.format(content['seed'])]
        for section in ('parameters', 'results', 'verdicts'):
            lines.append('')
            lines.append('[{}]'.format(section))
            lines.extend(_text_lines(content[section]))
        for name in report.tables:
            lines.append('')
            lines.append('[table {}]'.format(name))
            frame = report.table(name)
            if frame.empty:
                lines.append('(empty)')
            else:
                lines.append(frame.to_string(index=False, float_format=_format_value))
        if report.notes:
            lines.append('')
            lines.append('[notes]')
            lines.extend(report.notes)
        return '\n'.join(lines) + '\n'

    def __call__(self, output_dir, name, report):
        filename = os.path.join(output_dir, name + '.' + self.filesuffix)
        with io.open(filename, 'w', encoding='utf8') as textfile:
            textfile.write(self.render(report))
        return filename


EXPORTERS = {'json': ExportJson, 'csv': ExportCsv, 'text': ExportText}


def emit_report(report, fmt='json', destination=None, table=None):
    """Writes a report.

    Parameters
    ----------
    report : ScenarioReport
    fmt : str
        'json', 'csv' (tabular sections only) or 'text'.
    destination : None, str or file-like
        None or '-' writes to stdout. An existing directory receives
        '<scenario>.<suffix>'; any other string is used as file name.
    table : str or None
        Table to write in csv format. Defaults to the primary table.

    Returns
    -------
    str or None
        The written file name, if any.
    """
    if fmt not in EXPORTERS:
        raise ValueError('Unknown format {!r}; use one of {}'.format(fmt, FORMATS))
    exporter = EXPORTERS[fmt]()
    if fmt == 'csv':
        text = exporter.render(report, table)
    else:
        text = exporter.render(report)
    if destination is None or destination == '-':
        sys.stdout.write(text)
        return None
    if hasattr(destination, 'write'):
        destination.write(text)
        return None
    if os.path.isdir(destination):
        if fmt == 'csv':
            return exporter(destination, report.scenario, report, table)
        return exporter(destination, report.scenario, report)
    with io.open(destination, 'w', encoding='utf8') as handle:
        handle.write(text)
    return destination

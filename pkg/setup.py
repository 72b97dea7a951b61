#!/usr/bin/env python
# -*- encoding: utf-8 -*-
"""Setup script"""

from __future__ import absolute_import
from __future__ import print_function

import io
import re
from os.path import dirname
from os.path import join

from setuptools import find_packages
from setuptools import setup


def _read(*names, **kwargs):
    return io.open(
        join(dirname(__file__), *names),
        encoding=kwargs.get('encoding', 'utf8')
    ).read()


def _version():
    content = _read('src', 'twostate', 'version.py')
    return re.search(r"^version = '([^']+)'", content, re.M).group(1)


setup(
    name='twostate',
    version=_version(),
    license='GPL-3.0',
    description='Two-state vector calculations, ensemble bookkeeping and '
                'counterfactual checks for pre- and post-selected quantum systems',
    long_description='%s\n%s' % (
        re.compile('^.. start-badges.*^.. end-badges',
                   re.M | re.S).sub('', _read('README.rst')),
        re.sub(':[a-z]+:`~?(.*?)`', r'``\1``', _read('CHANGELOG.rst'))
    ),
    author='twostate developers',
    packages=find_packages('src'),
    package_dir={'': 'src'},
    include_package_data=True,
    zip_safe=False,
    python_requires='>=3.8',
    classifiers=[
        # complete list: http://pypi.python.org/pypi?%3Aaction=list_classifiers
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Operating System :: Unix',
        'Operating System :: POSIX',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    keywords=[
        'quantum mechanics', 'pre- and post-selection', 'two-state vector',
        'ABL rule', 'counterfactuals', 'monte carlo'
    ],
    install_requires=[
        'numpy',
        'pandas>=1.5',
        'scipy',
        'progress',
        'pydantic>=2',
    ],
    extras_require={
        "tests": ['pytest', 'pytest-cov', 'hypothesis'],
    },
    entry_points={
        'console_scripts': [
            'twostate = twostate.cli:main',
        ]
    }
)

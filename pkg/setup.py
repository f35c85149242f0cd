#!/usr/bin/env python3

import os

from setuptools import setup

requires = ['numpy>=1.17', 'scipy>=1.6']
test_requirements = ['pytest>=6.0', 'pytest-xdist>=2.0']

this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, 'README.rst')) as f:
    long_description = f.read()

setup(
    name='great_circles',
    version='0.1.0',
    description='Great circle fibrations of the 3-sphere: construction, checks and volume constants',
    long_description=long_description,
    packages=['great_circles'],
    install_requires=requires,
    extras_require={'test': test_requirements},
    python_requires='>=3.7',
    license='GPLv3',
    zip_safe=False,
    entry_points={
        'console_scripts': ['great-circles = great_circles.cli:main'],
    },
    classifiers=(
        'Development Status :: 3 - Alpha',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3 :: Only',
        'Programming Language :: Python :: Implementation :: CPython',
    ),
)

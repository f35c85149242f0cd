#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# great_circles documentation build configuration file.

import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath("../../"))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

source_suffix = '.rst'
master_doc = 'index'

project = 'great_circles'
copyright = '2026, great_circles developers'
author = 'great_circles developers'
version = '0.1.0'
release = '0.1.0'

language = 'en'
exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
    'scipy': ('https://docs.scipy.org/doc/scipy', None),
}

# Only the class' docstring is inserted.
autoclass_content = 'class'
autodoc_member_order = 'bysource'
napoleon_include_init_with_doc = True

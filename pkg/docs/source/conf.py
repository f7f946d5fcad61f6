# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys
sys.path.insert(0, os.path.abspath('../..'))

# -- Project information -----------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#project-information

project = 'semdisc'
copyright = '2025, semdisc contributors'
author = 'semdisc contributors'
release = '0.1.0'

# -- General configuration ---------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#general-configuration

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'sphinx_autodoc_typehints',
    'myst_parser',
    'sphinx_copybutton'
]

# Docstrings en estilo numpy
napoleon_numpy_docstring = True
napoleon_google_docstring = False

# -- Pygments (syntax highlighting) style -----------------------------------
pygments_style = 'emacs'
pygments_dark_style = 'dracula'

# MyST-Parser configuration
source_suffix = {
    '.rst': 'restructuredtext',
    '.md': 'markdown',
}

myst_enable_extensions = [
    "colon_fence",
    "deflist",
    "dollarmath",
    "fieldlist",
    "replacements",
    "smartquotes",
]

templates_path = ['_templates']
exclude_patterns = []

language = 'es'

# -- Options for HTML output -------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#options-for-html-output

html_theme = 'furo'

# Furo theme options
html_theme_options = {
    "light_css_variables": {
        "color-brand-primary": "#7b3fa0",
        "color-brand-content": "#5e2d7c",
    },
    "dark_css_variables": {
        "color-brand-primary": "#c79be3",
        "color-brand-content": "#b384d4",
    },
    "navigation_with_keys": True,
}

html_title = "semdisc"
html_short_title = "semdisc"

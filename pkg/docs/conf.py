"""Sphinx configuration file."""

project = "TracerCorr"
copyright = "2026, TracerCorr Authors"
author = "TracerCorr Authors"

extensions = [
    "numpydoc",
    "sphinx.ext.autodoc",
    "sphinx.ext.coverage",
    "sphinx.ext.doctest",
    "sphinx.ext.githubpages",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
]

templates_path = ["_templates"]

source_suffix = [".rst"]

master_doc = "index"

language = "en"

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

pygments_style = None

html_theme = "pydata_sphinx_theme"
htmlhelp_basename = "tracercorrdoc"
html_last_updated_fmt = "%c"

latex_elements = {}


latex_documents = [
    (
        master_doc,
        "tracercorr.tex",
        "TracerCorr Documentation",
        author,
        "manual",
    ),
]

man_pages = [
    (master_doc, "tracercorr", "TracerCorr Documentation", [author], 1)
]

texinfo_documents = [
    (
        master_doc,
        "tracercorr",
        "TracerCorr Documentation",
        author,
        "tracercorr",
        "Correlation factors of vacancy-mediated tracer diffusion.",
        "Miscellaneous",
    ),
]

epub_title = project
epub_exclude_files = ["search.html"]

# configure intersphinx
intersphinx_mapping = {
    "dimod": ("https://docs.ocean.dwavesys.com/en/stable/", None),
    "networkx": ("https://networkx.org/documentation/stable/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
    "python": ("https://docs.python.org/3/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}

# configure numpydoc
numpydoc_validation_checks = {"all", "GL01", "ES01", "SA01", "EX01"}
numpydoc_show_class_members = False
numpydoc_class_members_toctree = False

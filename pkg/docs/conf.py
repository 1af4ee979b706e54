import os
import re

HERE = os.path.dirname(__file__)
ROOT = os.path.dirname(HERE)

release = "unknown"

with open(os.path.join(ROOT, "qlio", "__init__.py"), "r") as fh:
    for line in fh:
        m = re.match('^__version__ = "([^"]+)"', line)
        if m:
            release = m.group(1)
            break


project = "qlio"
copyright = "2026, the qlio authors"
author = "the qlio authors"
extensions = ["sphinx.ext.autodoc"]
templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
html_theme = "alabaster"
master_doc = "index"

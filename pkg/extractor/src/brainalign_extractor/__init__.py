"""Hidden-state extraction for the encoding pipeline.

Runs a pretrained transformer over sliding word windows and writes one
BTMX tensor per layer, plus a checksum manifest. The downstream
regression package is a separate codebase; the only contract between
the two is the file formats (see FORMATS.md at the repository root).
"""

__version__ = "0.1.0"

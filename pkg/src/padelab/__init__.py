"""padelab: multipoint Padé approximants and hyperelliptic surface tools."""

__version__ = "0.1.0"

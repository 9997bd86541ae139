"""Workbench for Macdonald groups and the p-groups J, H and K."""

__version__ = "0.1.0"

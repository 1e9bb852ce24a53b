"""Slot-stepped simulator for satellite edge-computing service migration."""

__version__ = "0.1.0"

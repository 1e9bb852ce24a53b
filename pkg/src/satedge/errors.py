"""Exception hierarchy shared across the simulator.

ConfigurationError maps to CLI exit code 2, ProtocolError to exit code 3.
"""


class ConfigurationError(ValueError):
    """A config value or scenario file is invalid."""


class ScenarioError(ConfigurationError):
    """A scenario file failed schema validation; message names the field."""


class ProtocolError(RuntimeError):
    """A wire-protocol session was violated by the peer."""


class ActionError(ProtocolError):
    """A submitted action set does not match the active users or value ranges."""


class StateError(RuntimeError):
    """The environment was driven out of order (step before reset / after done)."""

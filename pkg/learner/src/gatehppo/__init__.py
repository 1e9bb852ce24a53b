"""Graph-temporal encoder with hybrid PPO for the satedge simulator."""

__version__ = "0.1.0"

"""Swarm-foraging simulator and scalability / self-organization /
flexibility metrics engine."""

__version__ = "0.1.0"

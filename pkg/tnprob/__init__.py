"""tnprob - probabilistic modeling with tensor networks and decohered Born machines."""

__version__ = "0.1.0"

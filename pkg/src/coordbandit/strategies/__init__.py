"""Strategy kernels: each module exposes a config, per-player reference state and a batch ``simulate``."""

"""evoloop: a self-evolution pipeline engine for speech-guided machine translation."""

__version__ = "0.1.0"

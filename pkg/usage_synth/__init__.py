"""usage-synth: synthetic smartphone app-usage generation and quality evaluation."""

__version__ = "0.1.0"

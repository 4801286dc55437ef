"""Document-level AMR: build, score and inject coreference."""
__version__ = "0.1.0"

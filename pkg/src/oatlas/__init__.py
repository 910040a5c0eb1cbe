"""oatlas: sentiment-labeled corpus exploration engine.

Pipeline: ingest -> label -> geocode -> topics -> timeseries -> snapshot -> serve.
"""

__version__ = "0.1.0"

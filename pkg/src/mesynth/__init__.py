"""Template-driven synthetic MES data: simulator, CDC lakehouse, star schema and constrained analytics tools."""

__version__ = "0.1.0"

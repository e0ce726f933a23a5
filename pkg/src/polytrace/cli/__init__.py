from .main import SCHEMA_VERSION, build_parser, main, run

__all__ = ["SCHEMA_VERSION", "build_parser", "main", "run"]

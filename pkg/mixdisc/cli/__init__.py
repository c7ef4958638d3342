from .main import main, run, build_parser, CommandLineError
from .instances import InstanceFile

__all__ = ["main", "run", "build_parser", "CommandLineError", "InstanceFile"]

"""
Command-line interface for Forested Links.
"""

from .command_handler import CommandHandler
from .main import build_parser, dispatch, main

__all__ = ["CommandHandler", "build_parser", "dispatch", "main"]

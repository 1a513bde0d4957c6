"""TracerCorr.__main__ module."""

from .run import cli

if __name__ == "__main__":
    cli()

"""CLI entry point for sparse-ots."""
from sparse_ots.cli.app import app

if __name__ == "__main__":
    app()

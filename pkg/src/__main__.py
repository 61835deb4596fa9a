"""Main entry point for nugrass"""

from .cli.nugrass_cli import main

if __name__ == "__main__":
    main()

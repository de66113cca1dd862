"""Allow ``python -m qmemory`` to behave exactly like the installed script."""
from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())

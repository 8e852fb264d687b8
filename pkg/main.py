"""
Run the revocable-abe toolkit from a source checkout.
"""
import sys

from revocable_abe.app.main import main

if __name__ == "__main__":
    sys.exit(main())

import sys

from hyperwalk.cli import main

# ---- Entry point: python main.py --figure pi_x --n 3 ----
if __name__ == "__main__":
    sys.exit(main())

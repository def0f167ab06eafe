# scripts/run_eval.py
import sys

from rts_eval.cli import main


if __name__ == "__main__":
    sys.exit(main())

import multiprocessing
import sys

from lb_lab.main import main

if __name__ == "__main__":
    # worker processes re-import this module under spawn and frozen builds
    multiprocessing.freeze_support()
    sys.exit(main())

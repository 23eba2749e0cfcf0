import sys

from icdiag.cli import main

sys.exit(main())

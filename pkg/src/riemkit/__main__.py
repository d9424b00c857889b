import sys

from riemkit.cli import main

sys.exit(main())

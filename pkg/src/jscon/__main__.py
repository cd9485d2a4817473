import sys

from jscon.cli import main

sys.exit(main())

import sys

from tdneat.cli import main

sys.exit(main())

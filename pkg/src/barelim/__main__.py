import sys

from barelim.cli import main

sys.exit(main())

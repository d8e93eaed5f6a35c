import sys

from alphagraph.cli import main

sys.exit(main())

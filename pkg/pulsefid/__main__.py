import sys

from pulsefid.cli import main

sys.exit(main())

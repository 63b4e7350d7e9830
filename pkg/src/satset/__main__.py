import sys

from satset.cli import main

sys.exit(main())

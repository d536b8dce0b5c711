import sys

from pathchains.cli import main

sys.exit(main())

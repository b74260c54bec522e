import sys

from heavyma.cli import main

sys.exit(main())

import sys

from exlab.cli import main

sys.exit(main())

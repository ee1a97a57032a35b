import sys

from ptw.cli import main

sys.exit(main())

import sys

from robonav.cli import main

sys.exit(main())

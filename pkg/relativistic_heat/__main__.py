import sys

from relativistic_heat.cli import main

sys.exit(main())

"""Allow ``python -m qcontract``."""

import sys

from qcontract.cli import main

sys.exit(main())

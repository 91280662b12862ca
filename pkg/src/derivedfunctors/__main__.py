import sys

from derivedfunctors.cli import main

sys.exit(main())

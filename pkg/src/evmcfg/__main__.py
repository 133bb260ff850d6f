import sys

from evmcfg.cli import main

sys.exit(main())

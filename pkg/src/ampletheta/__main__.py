import sys

from ampletheta.cli import main

sys.exit(main())

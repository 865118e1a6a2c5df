import sys

from chaoscomm.main import main

sys.exit(main())

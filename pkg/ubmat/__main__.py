import sys

from ubmat.main import main

sys.exit(main())

import sys

from thftcalc.main import main

sys.exit(main())

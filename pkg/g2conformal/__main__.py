import sys

from g2conformal.cli import main

sys.exit(main())

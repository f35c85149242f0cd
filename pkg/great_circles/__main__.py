import sys

from great_circles.cli import main

sys.exit(main())

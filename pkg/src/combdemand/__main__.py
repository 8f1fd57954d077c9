import sys

from combdemand.cli import main

sys.exit(main())

import sys

from tomoqkd.cli import main

sys.exit(main())

import sys

from muskat.main import main

sys.exit(main())

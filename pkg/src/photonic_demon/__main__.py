import sys

from photonic_demon.cli import main

sys.exit(main())

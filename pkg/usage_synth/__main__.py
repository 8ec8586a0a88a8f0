import sys

from usage_synth.cli import main

sys.exit(main())

import sys

from neuroedge.cli import main


sys.exit(main())

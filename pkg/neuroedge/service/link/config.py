import os
from dotenv import load_dotenv

load_dotenv()

LINK_TIMEOUT = float(os.getenv("NEUROEDGE_LINK_TIMEOUT", "30"))
MAX_FRAME_BYTES = int(os.getenv("NEUROEDGE_MAX_FRAME_BYTES", str(1 << 20)))
LENGTH_PREFIX_BYTES = 4

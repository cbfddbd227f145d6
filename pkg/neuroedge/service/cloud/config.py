import os
from dotenv import load_dotenv

load_dotenv()

REPULSION_U_MAX = float(os.getenv("NEUROEDGE_REPULSION_U_MAX", "1.0"))

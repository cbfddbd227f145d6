import os
from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("NEUROEDGE_LOG_LEVEL", "INFO").upper()
OUTPUT_DIR = os.getenv("NEUROEDGE_OUTPUT_DIR", "runs")
LOG_FORMAT = "%(asctime)-15s %(levelname)-8s %(message)s"

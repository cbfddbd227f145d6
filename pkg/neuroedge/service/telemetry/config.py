# Loihi-class figure for the energy of emitting one spike.
ENERGY_PER_SPIKE_PJ = 23.6

RUN_FILE = "run.csv"
SPIKES_FILE = "spikes.csv"
SUMMARY_FILE = "summary.json"
WEIGHTS_FILE = "weights.csv"

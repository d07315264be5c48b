"""
    IRS reflect-beam training experiments

    python index.py run --config scenarios/reference.json
    python index.py dump-plan --nx 32 --m 4
"""

import sys

import config_sim
from beamtrain.handlers import COMMANDS
from beamtrain.launcher import main

if __name__ == "__main__":
    sys.exit(main(COMMANDS, config_sim))

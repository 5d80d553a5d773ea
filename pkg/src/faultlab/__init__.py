"""faultlab: fault-injection workbench for AI accelerator reliability.

Quantifies how hardware faults (DRAM bit-flips in stored weights, stuck-at
faults in MAC logic cones, NVM aging/endurance in neuromorphic crossbars)
degrade inference accuracy and lifetime, and implements the corresponding
mitigations (PE deactivation, fault-aware training, reliability-aware
mapping).
"""

__version__ = "0.1.0"

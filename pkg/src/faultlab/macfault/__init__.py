"""Weight-stationary systolic-array model with logic-cone MAC faults.

Covers fault signatures and criticality classification, seeded fault maps,
the FSR-driven PE deactivation protocol, faulty inference on the array,
LSB-sensitivity sweeps, fault-aware training, and analytic MAC counts.
"""

from .faults import (
    CRITICAL,
    NON_CRITICAL,
    NON_CRITICAL_LSBS,
    PRODUCT_WIDTH,
    LogicConeFault,
    apply_fault_to_products,
    classify,
    faulty_mac,
    worst_case_error,
)
from .array import (
    ArrayConfig,
    ArrayState,
    DeactivationInfeasible,
    FaultStatusRegister,
    FsrEntry,
    SignatureMix,
    build_fsr,
    deactivate,
    per_column_fault_count,
    run_array,
    seed_fault_map,
)
from .counts import (
    Conv2d,
    Flatten,
    Linear,
    NetDescriptor,
    Pool,
    alexnet_descriptor,
    lenet5_descriptor,
    mac_count,
)
from .sweeps import SweepRow, lsb_sensitivity_sweep
from .training import fault_aware_train
from .mapfile import load_fault_map, save_fault_map

__all__ = [
    "ArrayConfig",
    "ArrayState",
    "CRITICAL",
    "Conv2d",
    "DeactivationInfeasible",
    "FaultStatusRegister",
    "Flatten",
    "FsrEntry",
    "Linear",
    "LogicConeFault",
    "NON_CRITICAL",
    "NON_CRITICAL_LSBS",
    "NetDescriptor",
    "PRODUCT_WIDTH",
    "Pool",
    "SignatureMix",
    "alexnet_descriptor",
    "apply_fault_to_products",
    "build_fsr",
    "classify",
    "deactivate",
    "fault_aware_train",
    "faulty_mac",
    "lenet5_descriptor",
    "load_fault_map",
    "lsb_sensitivity_sweep",
    "mac_count",
    "per_column_fault_count",
    "run_array",
    "save_fault_map",
    "seed_fault_map",
    "worst_case_error",
]

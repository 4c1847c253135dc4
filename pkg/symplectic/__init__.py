from .model_core import ManifoldModel, make_cp2, make_ruled, make_s2xs2
from .blowup import RadiiList, blow_up
from .invariants import SearchBudget, d_omega
from .packing import packing_number, vn_exact, vn_lower_bound

"""Two smart-card password authentication schemes, simulated side by side."""

from .crypto import GroupParams, OpCounter, gen_group_params
from .errors import Reject, RejectReason

__version__ = "0.1.0"
__all__ = ["GroupParams", "OpCounter", "gen_group_params", "Reject", "RejectReason", "__version__"]

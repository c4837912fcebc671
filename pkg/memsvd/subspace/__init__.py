from .basis import (
    coefficient_matrix,
    compute_basis,
    project_reconstruct,
    project_via_coefficients,
    residual_update,
)
from .incremental import (
    OnlineTracker,
    drift_report,
    init_online,
    update,
    update_single,
)

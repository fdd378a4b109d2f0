"""Self-similar mean curvature flow solitons among ruled and rotational surfaces.

Conventions used throughout:

* A surface is a soliton at ``t = 0`` when ``H = <cX + G X + T, N>`` for a
  dilation rate ``c``, a rotation generator ``G = a J`` about the motion
  axis and a translation ``T = b e`` along it (see :class:`MotionGenerators`).
* ``H`` is half the trace of the shape operator with respect to the normal
  returned alongside it; a round cylinder of radius ``r`` has ``H = -1/(2r)``
  for its outward normal.
* Revolution surfaces ``(phi cos u, phi sin u, psi)`` use the profile normal
  ``eta = (psi', -phi')`` and signed curvature
  ``kappa = (phi'' psi' - psi'' phi') / |tau|^3``; a counter-clockwise circle
  has ``kappa = -1``.
* Ruled surfaces ``beta + u w`` use ``N`` proportional to
  ``lambda w' + u w' ^ w`` (noncylindrical) or ``beta' ^ w`` (cylindrical).
"""

__version__ = "0.1.0"

from .catalog import ExactSolution, adjudicate_sol1, catalog_entries, get_entry, verify
from .curves import SampledCurve, resample_arclength
from .errors import *  # noqa: F401,F403
from .flow import FlowConfig, HomotheticMotion, evolve_profile, fit_homothety, self_similarity_report
from .geometry import (
    ConicalSurface,
    RevolutionSurface,
    RuledSurface,
    SurfaceSample,
    curve_frame,
    cylinder_over,
    ruled_invariants,
)
from .profile import (
    IntegrationConfig,
    ProfileState,
    figure_preset,
    integrate_cylindrical_graph,
    integrate_revolution_profile,
    run_preset,
)
from .residual import (
    MotionGenerators,
    ResidualReport,
    motion_field,
    pointwise_residual,
    residual_grid,
    revolution_soliton_residual,
)

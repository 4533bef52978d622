"""Structure-preserving pseudo-spectral solvers for binary-fluid models on the 2D torus.

Three coupled models share one spectral toolbox:

* ``transport``  -- momentum balance with a capillary stress and a purely
  transported concentration (no interfacial relaxation),
* ``nsac``       -- mass-conserving Navier-Stokes-Allen-Cahn dynamics with
  concentration-dependent density and viscosity,
* ``eulerac``    -- the inviscid, matched-density limit in
  vorticity-streamfunction form.

The package also ships a numerical lab for a logarithmic end-point estimate
of products of functions (``product_estimate``), and diagnostics that turn
the models' conservation/dissipation structure into measurable quantities.
"""

from .grid import Grid, ScalarField, Spectrum, VectorField
from .material import FluidParams
from .potential import PotentialParams

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "ScalarField",
    "Spectrum",
    "VectorField",
    "FluidParams",
    "PotentialParams",
    "__version__",
]

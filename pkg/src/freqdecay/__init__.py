"""freqdecay: a 2D numerical laboratory for elliptic boundary-value problems.

Solves divergence-form Dirichlet/Neumann problems under Lipschitz tensor
conductivities and Riemannian metrics on C^{1,1} domains, computes Steklov
spectra and boundary-datum frequencies, and measures interior decay profiles
against their closed-form disk references.
"""

__version__ = "0.1.0"

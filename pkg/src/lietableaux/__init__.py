"""Exact calculus of tableaux over Lie algebras.

Everything runs over the rationals with fractions.Fraction coefficients, so
every rank, kernel, character, cohomology dimension and torsion coefficient
is exact.  The main layers, bottom up:

- linalg: dense rational matrices, subspaces, fraction-free elimination
- spencer: the complex b (x) S^q(a*) (x) L^p(a*), coboundaries, cohomology
- tableau: subspaces of Hom(a, b), characters, prolongations, Cartan test
- lie: Lie algebras by structure constants, Killing form, Cartan pairs
- lie_tableau: splittings g = a (+) b, the torsion map tau, certification
- pds: the linear Pfaffian system attached to a certified tableau
- catalog: built-in worked instances, including the conformal so(4,1) ones
- cli: the `lietab` command line front end
"""

__version__ = "0.1.0"

from .linalg import Matrix, Subspace  # noqa: F401
from .tableau import Tableau, cartan_test  # noqa: F401
from .lie import LieAlgebra  # noqa: F401
from .lie_tableau import LieTableau, certify, make_lie_tableau  # noqa: F401
from .pds import build_pds, prolongation_tower, verify_involution  # noqa: F401

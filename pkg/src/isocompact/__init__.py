"""Compactifications of classical groups as isotropic Grassmannians, with
numerical tools for Anosov representations and their domains."""

__version__ = "0.1.0"

from .scalars import ScalarTag, MatK  # noqa: E402
from .tolerances import DEFAULT, Tolerances, RankAmbiguityError  # noqa: E402
from .forms import FormSpec, GLSpec, make_form, make_gl, parse_form, direct_sum_minus  # noqa: E402
from .subspaces import Subspace  # noqa: E402
from .compactify import embed_graph, unembed, act, diagonal, stratum_index, stratum_dimension  # noqa: E402
from .cartan import cartan_mu, lyapunov_lambda  # noqa: E402
from .anosov import RepSpec, divergence_profile, domination_constant, limit_set, boundary_point  # noqa: E402

__all__ = [
    "__version__", "ScalarTag", "MatK", "DEFAULT", "Tolerances", "RankAmbiguityError",
    "FormSpec", "GLSpec", "make_form", "make_gl", "parse_form", "direct_sum_minus", "Subspace",
    "embed_graph", "unembed", "act", "diagonal", "stratum_index", "stratum_dimension",
    "cartan_mu", "lyapunov_lambda", "RepSpec", "divergence_profile", "domination_constant",
    "limit_set", "boundary_point",
]

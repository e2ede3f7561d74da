"""Exact computation with Drinfeld modular forms for GL_2(F_q[θ]), q prime."""

from .carlitz import a_expansion, carlitz_d, carlitz_rho, goss_poly, t_a_series
from .eigencoeff import (
    Multiset,
    B_sigma,
    closed_form_coeff,
    index_of,
    multiset_of,
    nu_plus,
    recurrence_check,
    translation_operator,
    u_set_count,
    uniqueness_probe,
    universal_P,
    universal_solution,
    vanishing_predicate,
    xt_identity_check,
)
from .errors import DGFormsError, ParseError, PrecisionError, PreconditionError, ZeroDivisorError
from .forms import (
    double_cuspidal_basis,
    eigenform_search,
    eval_form_expr,
    form_delta,
    form_g,
    form_h,
    parse_form_expr,
)
from .hecke import DegOnePrime, eigen_check, hecke_apply, hecke_required_prec, lemma_recurrence_check
from .mvpoly import MVPoly
from .ring_core import FqContext, PolyA, RatK, binom_mod_p, enumerate_monic, frob_power
from .tseries import TSeries

__version__ = "0.1.0"

"""Analytics for the law of the Heston log-spot, from its MGF and explosion
boundaries to a factorization into Bessel-type laws."""
from .charfn import (big_f, big_g, charfn_albrecher, charfn_new, log_mgf, mgf,
                     p_quadratic)
from .density import (BesselFactor, DensityGrid, approx_law, convolve, factor_density,
                      factor_mgf, reference_density)
from .domain import (BracketLadder, CaseLabel, DomainReport, abscissa_curve, abscissae,
                     bracket_ladder, left_via_inversion, roots_of_p, t_zero)
from .errors import (ConsistencyError, DomainError, GridError, HestonLawError,
                     ParameterError, PoleError, UnsupportedCaseError)
from .factorize import (Factorization, build_factorization, enumerate_roots, hadamard_nu,
                        mgf_from_factors, mittag_leffler_eval, residues)
from .oracle import McConfig, mc_mgf, simulate_terminal
from .params import (EvalContext, ModelParams, SeriesTolerance, canonicalize,
                     invert_model, load_params, rescale)
from .special import L1, L2, bessel_i, gamma_fn
from .wings import (WingReport, inarrears_fair_strike, lee_beta, performance_note_price,
                    spot_moment, u_pm_effective, wing_report)

__version__ = "0.1.0"

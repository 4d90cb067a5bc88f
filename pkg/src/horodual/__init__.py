"""Duality between hypersurfaces of hyperbolic space and the space of horospheres."""

__version__ = "0.1.0"

from .errors import ConfigError, GeometryError
from .lorentz import (DeSitterPoint, HPoint, Horosphere, Isometry, busemann, hdist,
                      invariant_null_spectrum, make_isometry, mink_inner, model_convert)
from .hypersurface import (ImmersionJet, SurfaceFamily, build_surface, classify_convexity,
                           equidistant, forms_at, gauss_map, geodesic_sphere, horosphere_family,
                           horospherical_metric_direct, klein_quadric,
                           totally_geodesic_hyperplane)
from .horospace import (ChartPhi, GraphSurface, TGHyperplane, boundary_conformal_report,
                        cone_embed, curvature_star, normalized_factor, star_forms,
                        tangent_hyperplane)
from .duality import (de_sitter_dual, dualize, envelope_point, equidistant_envelope,
                      relation_check, weingarten_inversion)
from .admissibility import (admissibility_test, conformal_curvature, principal_from_ricci,
                            reconstruct_surface, roundtrip_check)
from .factors import Constant, Harmonic, Linear, Quadratic, Sum, factor_from_dict

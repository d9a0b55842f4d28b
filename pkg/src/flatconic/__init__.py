"""flatconic: ellipse/strip cell complexes on translation surfaces.

A translation surface is described by glued polygons (`surface`).  Around a
base point one develops a radius-R window of cone points (`develop`), finds
the rigid immersed ellipses and strips through at least three of them
(`rigid_conics`), and assembles the polygonal two-cells they bound into a
windowed cell complex (`build_complex`).  Affine maps between two such
windows can be certified cell-by-cell (`matching_from_affine`,
`reconstruct`, `discover_affine`), which yields a windowed Veech-group
membership test (`veech_check`) and a hyperbolic tessellation of the window
(`tessellate`, `render_svg`).
"""

from .quadform import (
    CollinearTripleError,
    QForm3,
    canonical_scale,
    combine,
    degenerate_members,
    forms_vanishing_on,
    from_poly,
    lift,
    natural_basis,
    pencil_coefficients,
    radical,
    signature,
    signature_restriction,
    transform_by_affine,
)
from .subconic import (
    DegenerateConfiguration,
    SubconicKind,
    classify,
    conic_through_five,
    contains,
    is_nowhere_negative,
    strip_direction,
    subconic,
)
from .surface import (
    Chart,
    SurfaceDesc,
    SurfaceError,
    default_base,
    develop,
    dist2,
    locate,
    parse_surface,
    rebase,
    surface_to_json,
)
from .models import l_shape, square_torus, two_marked_torus
from .cellcomplex import (
    CellComplexWindow,
    CellMatching,
    NotRealizable,
    RigidConic,
    TwoCell,
    WindowTooSmall,
    build_complex,
    complex_to_json,
    default_seed,
    follows,
    frontier_bijection,
    link,
    matching_from_affine,
    realizable_quadruple,
    realizable_triple,
    rigid_conics,
    two_cell,
)
from .geom import (
    Config,
    HPoint,
    INFINITY,
    check_geometric_lemma,
    class_key,
    h_point,
    homothety_class,
    mobius,
    normalize_ellipse,
    oriented_bisector,
    q_rotation,
    quadruple_form,
    rotation_angle,
)
from .veech import (
    AffineCandidate,
    Tessellation,
    VeechVerdict,
    discover_affine,
    psi_of_quadruple,
    reconstruct,
    tessellate,
    veech_check,
)
from .render import render_svg

__version__ = "0.1.0"

"""Area-proportional Venn/Euler diagrams from identifier lists.

Circle areas and pairwise overlaps are sized to set and intersection
cardinalities; centers are placed by gradient descent on distance targets;
region counts land at each region's pole of inaccessibility.
"""

from .colors import DEFAULT_PALETTE, Color, parse_color
from .errors import (
    DiagramError,
    DivergenceError,
    GeometryError,
    InputError,
    RenderError,
)
from .geometry import (
    Circle,
    CircleModel,
    PolePlacement,
    Polygon,
    area_scale_for_canvas,
    distance_for_overlap,
    lens_area,
    pole_of_inaccessibility,
    polygonize_circle,
    radius_for_size,
    region_polygons,
    target_distance_matrix,
)
from .optimizer import (
    LayoutSession,
    LayoutState,
    RunConfig,
    RunStatus,
    epoch_step,
    initial_positions,
    initialize,
    loss,
    loss_gradient,
    placement_order,
    run,
)
from .render import (
    DiagramConfig,
    LabelSpec,
    compute_labels,
    fit_viewport,
    format_label,
    rasterize_png,
    render_svg,
)
from .setops import IdSet, RegionTable, build_region_table, dedupe, parse_id_list

__version__ = "0.1.0"

"""Persistent homology of binary-image filtrations, coincidence of classes
as sheaf sections, and local branch-number heat maps."""

from .branch import (
    HeatMap,
    PatchReport,
    ShortFiltration,
    branch_windows,
    heat_map,
    local_branch_number,
    short_filtrations,
    verify_patch,
)
from .cubical import (
    CubicalComplex,
    HomologyBasis,
    InducedMap,
    PersistentHomology,
    betti,
    complex_of,
    homology_basis,
    induced_map,
    persistent_homology,
)
from .imageio import (
    BinaryImage,
    ImageFiltration,
    Patch,
    Window,
    build_filtration,
    extract_patch,
    load_image,
    save_image,
    threshold,
)
from .persistence import Bar, PersistenceDiagram, bars_with, class_barcode, persistence_diagram
from .sheaf import (
    CellularSheaf,
    FinitePoset,
    SectionSpace,
    coincide,
    coincidence_as_section,
    make_sheaf,
    sections,
)
from .z2 import Z2Matrix

__version__ = "0.1.0"

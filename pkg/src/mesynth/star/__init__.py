from .builder import (
    BRIDGES,
    DIMENSIONS,
    FACTS,
    STAR_TABLES,
    BuiltFrom,
    MappingMismatch,
    SourceInconsistent,
    StarSchema,
    date_key,
    export_star,
    rebuild,
    rebuild_from_registry,
)
from .mappings import DimensionMappings, StationRow, derive_mappings

from .casing import serialize_row, to_pascal, to_snake
from .catalog import (
    APPEND_ONLY_TABLES,
    CDC_TABLES,
    MUTABLE_TABLES,
    Column,
    TableCatalog,
    TableClass,
    TableDef,
    define_schema,
)
from .store import (
    Batch,
    ChangeRecord,
    CommitReceipt,
    DuplicateKey,
    ForeignKeyViolation,
    ImmutableTable,
    NotFound,
    RequiredFieldMissing,
    Store,
    StoreError,
    UnknownColumn,
    replay_changelog,
)

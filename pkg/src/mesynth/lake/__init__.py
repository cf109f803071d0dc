from .lakehouse import (
    DEFAULT_RETAIN,
    DataFile,
    LakeError,
    Lakehouse,
    LakeLocked,
    LakeWriteFailure,
    Manifest,
    SyncLock,
)
from .sync import (
    CRASH_POINTS,
    LakeView,
    SimulatedCrash,
    SyncLoop,
    SyncReport,
    SyncState,
    lake_matches_store,
    recover,
    sync_cycle,
)

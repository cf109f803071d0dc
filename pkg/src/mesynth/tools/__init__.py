from .execute import TOOLS, TOTAL_ROW, NotFound, ResultTable, StaleSchema, execute_tool
from .schemas import (
    CHANGE_PACKAGE_PATTERN,
    ORDER_PATTERN,
    SERIAL_PATTERN,
    TOOL_DOMAINS,
    TOOL_NAMES,
    Parameter,
    SchemaService,
    ToolSchema,
    build_schemas,
    export_function_schemas,
    generate_tool_schemas,
)
from .validation import (
    ConstraintError,
    MissingParameter,
    ToolCall,
    ToolCallError,
    UnknownParameter,
    UnknownTool,
    ValidatedCall,
    admit_unchecked,
    check_call,
    validate_call,
)

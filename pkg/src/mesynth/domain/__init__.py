from .model import REQUIRED_EXPORTS, DomainTemplate, EquipmentNode, FailureCode, Product, Station
from .parser import MissingExports, ParseError, TemplateError, parse_template, serialize_template
from .registry import (
    SHIPPED_TEMPLATES,
    ActiveTemplate,
    NoActiveTemplate,
    RelationalViolations,
    TemplateRegistry,
    UnknownTemplate,
    available_templates,
    load_template,
)
from .relations import ValidationReport, Violation, validate_relations
from .vocabulary import VocabularyProjection, vocabulary_projection

__all__ = [
    "REQUIRED_EXPORTS", "DomainTemplate", "EquipmentNode", "FailureCode", "Product", "Station",
    "MissingExports", "ParseError", "TemplateError", "parse_template", "serialize_template",
    "SHIPPED_TEMPLATES", "ActiveTemplate", "NoActiveTemplate", "RelationalViolations", "TemplateRegistry",
    "UnknownTemplate", "available_templates", "load_template",
    "ValidationReport", "Violation", "validate_relations",
    "VocabularyProjection", "vocabulary_projection",
]

"""
Utility functions for Forested Links.
"""

import json
import yaml
from fractions import Fraction
from pathlib import Path
from typing import Dict, Any, Type, TypeVar

from pydantic import BaseModel
from pydantic import ValidationError as SchemaError

from shared.core.errors import MalformedDocumentError, ValidationError

ModelT = TypeVar("ModelT", bound=BaseModel)


def dump_json(data: Dict[str, Any]) -> str:
    """Deterministic JSON text: sorted keys, two-space indent."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)


def save_json(data: Dict[str, Any], file_path: Path) -> None:
    """Save data to JSON file with error handling."""
    try:
        with open(file_path, 'w', encoding='utf-8') as f:
            f.write(dump_json(data))
            f.write("\n")
    except OSError as e:
        raise ValidationError(f"Error saving JSON to {file_path}: {e}")


def load_document(file_path: Path) -> Dict[str, Any]:
    """Load a JSON document, or a YAML one when the suffix is .yaml/.yml."""
    file_path = Path(file_path)
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            if file_path.suffix.lower() in (".yaml", ".yml"):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"File not found: {file_path}")
    except json.JSONDecodeError as e:
        raise MalformedDocumentError(f"Error parsing JSON from {file_path}: {e}")
    except yaml.YAMLError as e:
        raise MalformedDocumentError(f"Error parsing YAML from {file_path}: {e}")
    except OSError as e:
        raise ValidationError(f"Error loading document from {file_path}: {e}")

    if not isinstance(data, dict):
        raise MalformedDocumentError(f"Expected a JSON object at the top level of {file_path}")
    return data


def parse_model(model: Type[ModelT], data: Dict[str, Any]) -> ModelT:
    """Validate a raw document against its schema."""
    try:
        return model.model_validate(data)
    except SchemaError as e:
        raise MalformedDocumentError(f"Invalid {model.__name__}: {e.error_count()} error(s): {e.errors()[0]['msg']}")


def load_model(model: Type[ModelT], file_path: Path) -> ModelT:
    return parse_model(model, load_document(file_path))


def parse_rational(value: Any) -> Fraction:
    """Exact rational from an integer or a "p/q" / finite decimal string."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"Coordinate {value!r} is not exact; use an integer or a 'p/q' string")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"Invalid rational {value!r}")
    raise ValidationError(f"Invalid rational {value!r}")


def parse_pair(text: str) -> tuple:
    """Parse an ``i,j`` vertex pair from the command line."""
    parts = [part.strip() for part in str(text).split(",")]
    if len(parts) != 2 or not all(part.lstrip("-").isdigit() for part in parts):
        raise ValidationError(f"Expected a vertex pair 'i,j', got {text!r}")
    return int(parts[0]), int(parts[1])

"""JSON schemas for the CLI inputs and outputs.

Readers accept exactly what the CLI writes, so every emitted document can be
fed back in.
"""

from __future__ import annotations

import json
from typing import Any, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ParseError

__all__ = [
    "CartanModel",
    "PairModel",
    "ParamsModel",
    "QSPParamsModel",
    "RelationModel",
    "PresentationModel",
    "Diagnostic",
    "read_model",
    "SCHEMAS",
]

Label = Union[int, str]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CartanModel(_Strict):
    labels: Optional[list[Label]] = None
    matrix: list[list[int]]
    gim: bool = False

    @field_validator("matrix")
    @classmethod
    def _square(cls, m):
        if not m or any(len(r) != len(m) for r in m):
            raise ValueError("matrix must be square and nonempty")
        return m


class PairModel(_Strict):
    X: list[Label] = Field(default_factory=list)
    tau: dict[str, Label] = Field(default_factory=dict)


class ParamsModel(_Strict):
    """c and s keyed by label, values in the scalar expression grammar."""

    c: dict[str, str] = Field(default_factory=dict)
    s: dict[str, str] = Field(default_factory=dict)


class QSPParamsModel(ParamsModel):
    pair: PairModel


class RelationModel(_Strict):
    name: str
    kind: str
    text: str
    latex: str
    verified: bool
    coefficients: dict[str, str] = Field(default_factory=dict)


class PresentationModel(_Strict):
    generators: list[str]
    params: QSPParamsModel
    ok: bool
    relations: list[RelationModel]


class Diagnostic(_Strict):
    error: str
    message: str
    command: Optional[str] = None
    detail: Optional[Any] = None


SCHEMAS = {
    "cartan": CartanModel,
    "pair": PairModel,
    "params": QSPParamsModel,
    "presentation": PresentationModel,
    "diagnostic": Diagnostic,
}


def read_model(model: type[BaseModel], data: Union[str, dict]) -> BaseModel:
    """Validate a dict or JSON text; raises :class:`ParseError` on bad input."""
    try:
        if isinstance(data, str):
            return model.model_validate_json(data)
        return model.model_validate(data)
    except ValidationError as exc:
        raise ParseError(f"invalid {model.__name__}: {exc.errors(include_url=False)}") from None
    except json.JSONDecodeError as exc:  # pragma: no cover - pydantic wraps these
        raise ParseError(f"invalid JSON: {exc}") from None

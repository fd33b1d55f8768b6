from dataclasses import asdict, fields
from datetime import date, datetime

import numpy as np


def to_builtin(value):
    """Convert numpy scalars/arrays and dates into JSON-friendly builtins"""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (datetime, date)):
        return value.isoformat()
    return value


class BaseModel:
    """Base model class for dataclass value objects"""

    def to_dict(self):
        """Convert model to dictionary"""
        return to_builtin(asdict(self))

    @classmethod
    def from_dict(cls, data):
        """Build an instance from the output of ``to_dict``"""
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


import json
import os
from logging import getLogger

import numpy as np

from ..core.errors import ContractViolation, LoadError
from . import EncoderConfig, ModelParams

logger = getLogger(__name__)

FORMAT_VERSION = 1


def save_checkpoint(path, params: ModelParams):
    doc = {
        "format_version": FORMAT_VERSION,
        "config": params.config.to_dict(),
        "variant": params.variant,
        "tensors": {
            name: {
                "shape": list(params.tensors[name].shape),
                "values": [float(x) for x in params.tensors[name].reshape(-1)],
            }
            for name in params.names()
        },
    }
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, separators=(",", ":"))
        f.write("\n")
    logger.info(f"Saved {len(doc['tensors'])} tensors to {path}")


def load_checkpoint(path) -> ModelParams:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise LoadError(f"not valid JSON: {e.msg}", path, e.lineno) from None
    if not isinstance(doc, dict):
        raise LoadError("checkpoint must be a JSON object", path)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise LoadError(f"unsupported format_version {version!r}", path)
    try:
        config = EncoderConfig.from_dict(doc["config"])
        tensors = {}
        for name, entry in doc["tensors"].items():
            shape = tuple(int(s) for s in entry["shape"])
            values = np.array(entry["values"], dtype=np.float64)
            if values.size != int(np.prod(shape)):
                raise LoadError(
                    f"tensor '{name}' has {values.size} values for shape {shape}", path
                )
            tensors[name] = values.reshape(shape)
        return ModelParams(config, doc.get("variant", "two_step"), tensors)
    except (KeyError, TypeError, ContractViolation) as e:
        raise LoadError(f"malformed checkpoint: {e}", path) from None

"""JSON Schemas (draft 2020-12) for the files the toolkit writes."""

_PARTS = {"type": "object", "required": ["train", "dev", "test"],
          "properties": {p: {"type": "integer", "minimum": 0} for p in ("train", "dev", "test")}}

SPLIT_PROVENANCE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["language", "mode", "proportions", "seed", "checksum", "counts"],
    "properties": {
        "language": {"type": "string"},
        "mode": {"enum": ["form", "lemma"]},
        "proportions": {
            "type": "array",
            "items": {"type": "string", "pattern": r"^\d+(/\d+)?$"},
            "minItems": 3,
            "maxItems": 3,
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": 18446744073709551615},
        "checksum": {"type": "string", "pattern": "^sha256:[0-9a-f]{64}$"},
        "counts": _PARTS,
        "tables": _PARTS,
        "toolkit_version": {"type": "string"},
        "rng": {"type": "string"},
    },
}

EVAL_RESULT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["language", "system", "split_mode", "accuracy", "mean_edit_distance", "n"],
    "properties": {
        "language": {"type": "string"},
        "system": {"type": "string"},
        "split_mode": {"enum": ["form", "lemma"]},
        "accuracy": {"type": "number", "minimum": 0, "maximum": 1},
        "mean_edit_distance": {"type": "number", "minimum": 0},
        "n": {"type": "integer", "minimum": 0},
    },
}

DROP_RECORD = {
    "type": "object",
    "required": ["language", "family", "system", "train_examples", "form_acc", "lemma_acc", "drop"],
    "properties": {
        "language": {"type": "string"},
        "family": {"type": "string"},
        "system": {"type": "string"},
        "train_examples": {"type": "integer", "minimum": 0},
        "form_acc": {"type": "number", "minimum": 0, "maximum": 1},
        "lemma_acc": {"type": "number", "minimum": 0, "maximum": 1},
        "drop": {"type": "number", "minimum": -1, "maximum": 1},
    },
}

DROP_REPORT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["records", "macro_average_drop"],
    "properties": {
        "records": {"type": "array", "items": DROP_RECORD},
        "macro_average_drop": {
            "type": "object",
            "required": ["systems", "overall"],
            "properties": {
                "systems": {"type": "object", "additionalProperties": {"type": "number"}},
                "overall": {"type": "number"},
            },
        },
    },
}

FAMILY_AGGREGATES = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "array",
    "items": {
        "type": "object",
        "required": ["family", "mode", "mean_accuracy_across_systems", "best_system",
                     "best_accuracy", "n_languages"],
        "properties": {
            "family": {"type": "string"},
            "mode": {"enum": ["form", "lemma"]},
            "mean_accuracy_across_systems": {"type": "number", "minimum": 0, "maximum": 1},
            "best_system": {"type": "string"},
            "best_accuracy": {"type": "number", "minimum": 0, "maximum": 1},
            "n_languages": {"type": "integer", "minimum": 1},
            "system_means": {"type": "object", "additionalProperties": {"type": "number"}},
        },
    },
}

"""Shared plumbing for the experiment scripts: dataclass configs from the command line, JSON output."""
from __future__ import annotations

import argparse
import dataclasses
import json
from pathlib import Path
import typing


def parse_config(cls, description: str):
    """Build a dataclass instance from ``--field value`` flags (tuples take comma separated values)."""
    parser = argparse.ArgumentParser(description=description)
    hints = typing.get_type_hints(cls)
    for f in dataclasses.fields(cls):
        kind = hints[f.name]
        flag = "--" + f.name.replace("_", "-")
        if typing.get_origin(kind) is tuple:
            inner = typing.get_args(kind)[0]
            parser.add_argument(flag, default=f.default,
                                type=lambda text, inner=inner: tuple(inner(x) for x in text.split(",")))
        else:
            parser.add_argument(flag, type=kind, default=f.default)
    return cls(**vars(parser.parse_args()))


def write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")

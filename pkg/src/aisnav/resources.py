"""Bundled worlds and genomes, looked up by name or path."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .genome import Genome, parse_genome
from .simworld import World, parse_world

DEFAULT_GENOME = "rooms_seed0"


def _names(folder: str, suffix: str) -> list[str]:
    root = resources.files("aisnav") / folder
    return sorted(p.name[: -len(suffix)] for p in root.iterdir() if p.name.endswith(suffix))


def builtin_worlds() -> list[str]:
    return _names("worlds", ".world")


def builtin_genomes() -> list[str]:
    return _names("genomes", ".genome")


def _text(name: str, folder: str, suffix: str) -> tuple[str, str]:
    """Read `name` as a file path, falling back to a bundled resource name."""
    path = Path(name)
    if path.is_file():
        return path.read_text(), path.stem
    if name in _names(folder, suffix):
        return (resources.files("aisnav") / folder / (name + suffix)).read_text(), name
    raise FileNotFoundError(f"no such file or bundled {folder[:-1]}: {name}")


def load_world(name: str) -> World:
    text, name = _text(name, "worlds", ".world")
    return parse_world(text, name=name)


def load_genome(name: str = DEFAULT_GENOME) -> Genome:
    text, _ = _text(name, "genomes", ".genome")
    return parse_genome(text)

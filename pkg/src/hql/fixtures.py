"""Access to the shipped example corpus.

The corpus covers one family per flavour of check: a cancellative groupoid
(subtraction mod 3), the two-element lattice and Boolean algebra, a
three-element flat algebra with a broken sibling, and a handful of small
derivations.  Files compose in the order returned by `fixture_paths`.
"""

from __future__ import annotations

from importlib import resources

from .dsl import Workspace

FIXTURE_FILES = (
    "quasigroup.hql",
    "lattice.hql",
    "boolean.hql",
    "flat.hql",
    "proofs.hql",
)


def fixture_path(name: str) -> str:
    path = resources.files(__package__).joinpath("fixtures", name)
    return str(path)


def fixture_paths() -> list[str]:
    return [fixture_path(name) for name in FIXTURE_FILES]


def load_workspace() -> Workspace:
    """The whole corpus in one registry."""
    return Workspace.load(fixture_paths())

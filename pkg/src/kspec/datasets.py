"""Bundled classic network datasets and their provenance.

Only files present under ``kspec/data/`` can be loaded offline.  The
registry also records the canonical node/edge counts of each dataset so
that results obtained on a divergent file version are flagged loudly
instead of silently accepted.  ``tools/fetch_datasets.py`` (repository
root) downloads and converts the missing ones when network access is
available.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from importlib import resources

from .graphs import Graph, largest_connected_component, parse_edge_list

logger = logging.getLogger(__name__)

__all__ = ["DatasetInfo", "DatasetMissingError", "REGISTRY", "dataset_names",
           "dataset_path", "load_dataset"]


class DatasetMissingError(FileNotFoundError):
    """A registered dataset file is not bundled in this installation."""


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    filename: str
    description: str
    source_url: str
    expected_n: int
    expected_m: int
    truth: int | None = None
    use_lcc: bool = False          # evaluate on the largest component
    lcc_n: int | None = None
    sha256: str | None = None      # pinned digest of the bundled file


REGISTRY: dict[str, DatasetInfo] = {
    "karate": DatasetInfo(
        name="karate",
        filename="karate.txt",
        description="Zachary karate club friendships (1977)",
        source_url="https://websites.umich.edu/~mejn/netdata/karate.zip",
        expected_n=34, expected_m=78, truth=2,
        sha256="b1fffc99164cd469ec53178c73c4d6e25efbd3a8f60fe7f684a4c5d5fe218897",
    ),
    "dolphins": DatasetInfo(
        name="dolphins",
        filename="dolphins.txt",
        description="Lusseau bottlenose dolphin social network (2003)",
        source_url="https://websites.umich.edu/~mejn/netdata/dolphins.zip",
        expected_n=62, expected_m=159, truth=2,
    ),
    "polbooks": DatasetInfo(
        name="polbooks",
        filename="polbooks.txt",
        description="Krebs/Newman co-purchased US politics books (2004)",
        source_url="https://websites.umich.edu/~mejn/netdata/polbooks.zip",
        expected_n=105, expected_m=441, truth=3,
    ),
    "football": DatasetInfo(
        name="football",
        filename="football.txt",
        description="Girvan-Newman US college football schedule (2000)",
        source_url="https://websites.umich.edu/~mejn/netdata/football.zip",
        expected_n=115, expected_m=613, truth=12,
    ),
    "polblogs": DatasetInfo(
        name="polblogs",
        filename="polblogs.txt",
        description="Adamic-Glance US political blog links (2004), symmetrized",
        source_url="https://websites.umich.edu/~mejn/netdata/polblogs.zip",
        expected_n=1490, expected_m=16715, truth=2,
        use_lcc=True, lcc_n=1222,
    ),
}


def dataset_names() -> list[str]:
    return list(REGISTRY)


def dataset_path(name: str):
    """Filesystem path of the bundled file for ``name`` (may not exist)."""
    info = REGISTRY[name]
    return resources.files("kspec").joinpath("data", info.filename)


def load_dataset(name: str, apply_lcc: bool | None = None) -> tuple[Graph, DatasetInfo]:
    """Load a bundled dataset by registry name.

    ``apply_lcc`` overrides the registry's largest-connected-component
    policy (``None`` keeps it).  Divergence from the pinned checksum or
    the canonical node/edge counts is reported via warnings, never
    hidden.  Raises :class:`DatasetMissingError` when the file is not
    bundled.
    """
    if name not in REGISTRY:
        raise KeyError(f"unknown dataset {name!r}; known: {', '.join(REGISTRY)}")
    info = REGISTRY[name]
    path = dataset_path(name)
    if not path.is_file():
        raise DatasetMissingError(
            f"dataset {name!r} is not bundled ({info.filename} missing); "
            f"run tools/fetch_datasets.py with network access, source: {info.source_url}")
    text = path.read_text(encoding="utf-8")
    if info.sha256 is not None:
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        if digest != info.sha256:
            logger.warning("dataset %s: file digest %s differs from pinned %s; "
                           "results may not match the reference values",
                           name, digest[:12], info.sha256[:12])
    g = parse_edge_list(text)
    if g.n != info.expected_n or g.m != info.expected_m:
        logger.warning("dataset %s: loaded n=%d m=%d, canonical n=%d m=%d; "
                       "this looks like an alternative version of the dataset",
                       name, g.n, g.m, info.expected_n, info.expected_m)
    if apply_lcc is None:
        apply_lcc = info.use_lcc
    if apply_lcc:
        g, _ = largest_connected_component(g)
        if info.lcc_n is not None and g.n != info.lcc_n:
            logger.warning("dataset %s: largest component has n=%d, expected %d",
                           name, g.n, info.lcc_n)
    return g, info

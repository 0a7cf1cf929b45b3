#!/usr/bin/env python3
"""Fetch and convert the classic network datasets into bundled edge lists.

Needs network access and networkx (for GML parsing); neither is a
package dependency.  Each dataset is downloaded as a zip of a GML file,
converted deterministically, and written to ``src/kspec/data/``:

* nodes are relabeled 0..n-1 in their GML file order;
* edge direction is dropped; duplicates and self-loops survive into the
  file and are simplified (with counts) by the package loader;
* lines are ``u v`` sorted lexicographically, with a short provenance
  header.

After fetching, re-run ``pytest tests/test_acceptance.py`` and record
the printed SHA-256 digests in ``kspec/datasets.py`` to pin the files.
"""

import hashlib
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from kspec.datasets import REGISTRY  # noqa: E402

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "kspec" / "data"


def convert_gml(gml_bytes: bytes, name: str) -> str:
    import networkx as nx

    g = nx.parse_gml(io.BytesIO(gml_bytes).read().decode("latin-1"),
                     label="id")
    order = {node: i for i, node in enumerate(g.nodes())}
    pairs = sorted((min(order[u], order[v]), max(order[u], order[v]))
                   for u, v in g.edges())
    info = REGISTRY[name]
    lines = [f"# {info.description}",
             f"# source: {info.source_url}",
             "# nodes relabeled 0..n-1 in GML order; direction dropped"]
    lines += [f"{u} {v}" for u, v in pairs]
    return "\n".join(lines) + "\n"


def main() -> int:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name, info in REGISTRY.items():
        target = DATA_DIR / info.filename
        if target.exists():
            print(f"{name}: already present, skipping")
            continue
        print(f"{name}: downloading {info.source_url}")
        try:
            with urllib.request.urlopen(info.source_url, timeout=60) as resp:
                payload = resp.read()
            with zipfile.ZipFile(io.BytesIO(payload)) as zf:
                gml_name = next(n for n in zf.namelist() if n.endswith(".gml"))
                text = convert_gml(zf.read(gml_name), name)
        except Exception as exc:
            print(f"{name}: FAILED ({exc})")
            failures += 1
            continue
        target.write_text(text, encoding="utf-8")
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        print(f"{name}: wrote {target} sha256={digest}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

"""
Bundled example models with their certified invariants
"""

from dataclasses import dataclass
from typing import Any, Dict, List

from symplectic.errors import PacklabError
from symplectic.invariants import d_omega
from symplectic.model_core import validate
from symplectic.packing import n_threshold, packing_number
from utils.model_io import load_model
from utils.workers import parallel_map

from cli.render import format_class, rational_or_inf


@dataclass(frozen=True)
class GalleryEntry:
    ref: str
    description: str


GALLERY = (
    GalleryEntry("gallery:cp2", "CP^2 with the Fubini-Study class l; P = 9"),
    GalleryEntry("gallery:s2xs2:1:1", "S^2 x S^2 with equal areas; P = 8"),
    GalleryEntry("gallery:s2xs2:1:2", "S^2 x S^2 with areas 1 and 2; P in [4, 16]"),
    GalleryEntry("gallery:ruled:1:3:2", "T^2 x S^2 with base area 3, fibre area 2; P = 3"),
    GalleryEntry("gallery:enriques", "b+ = 1, K = 0 (torsion truncated); D_Omega empty, P = 1"),
)


def describe(entry: GalleryEntry) -> Dict[str, Any]:
    model = load_model(entry.ref)
    report = validate(model)
    d = d_omega(model)
    bracket = packing_number(model)
    try:
        threshold = n_threshold(model)
    except PacklabError:
        threshold = None
    return {
        "ref": entry.ref,
        "name": model.name,
        "description": entry.description,
        "b_plus": report.b_plus,
        "d_omega": rational_or_inf(d.value),
        "d_status": d.status,
        "witness": format_class(model.lattice.basis_labels, d.witness) if d.witness else None,
        "n_threshold": threshold,
        "packing_number": {"lower": bracket.lower, "upper": bracket.upper, "exact": bracket.exact},
    }


def gallery_report(threads: int = 1) -> List[Dict[str, Any]]:
    return parallel_map(describe, GALLERY, threads=threads)

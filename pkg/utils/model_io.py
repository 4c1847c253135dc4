#!/usr/bin/env python3
"""
Model file loader
Reads manifold models from JSON/YAML documents or gallery references
"""

import json
import os
from typing import Any, Dict, List, Optional

import yaml

from symplectic.blowup import blow_up
from symplectic.model_core import (
    BuiltinKind,
    BuiltinTag,
    CohomologyFunctional,
    IntersectionLattice,
    ManifoldModel,
    ModelFlags,
    RationalFormatError,
    format_rational,
    make_cp2,
    make_ruled,
    make_s2xs2,
    parse_rational,
    require_valid,
)
from utils.logger import logger

GALLERY_PREFIX = "gallery:"


class ModelSchemaError(ValueError):
    """Model document does not follow the schema; `path` names the offending field"""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def enriques_like() -> ManifoldModel:
    """
    b+ = 1 model with K numerically trivial (torsion truncated)

    Minimal, not rational or ruled, asserted in class C. Every class with
    Omega(B) > 0 has c1(B) = 0, so D_Omega is empty.
    """
    return require_valid(
        ManifoldModel(
            lattice=IntersectionLattice(((1, 0), (0, -1)), ("H", "F")),
            c1=CohomologyFunctional.of(0, 0),
            omega=CohomologyFunctional.of(2, 1),
            flags=ModelFlags(in_class_C=True, minimal=True, rational_or_ruled=False),
            name="Enriques-like",
        )
    )


class ModelLoader:
    """Manifold model loader"""

    FILE_FORMATS = {
        ".json": "json",
        ".yaml": "yaml",
        ".yml": "yaml",
    }

    FLAG_KEYS = ("in_class_C", "minimal", "rational_or_ruled")

    def load(self, ref: str, check: bool = True) -> ManifoldModel:
        """
        Load a model from a file path or a gallery reference

        Gallery references: gallery:cp2[:s], gallery:s2xs2:alpha:beta,
        gallery:ruled:g:beta:alpha, gallery:enriques. With check=False a
        well-formed but invalid document is returned unvalidated.
        """
        if ref.startswith(GALLERY_PREFIX):
            return self.from_gallery(ref[len(GALLERY_PREFIX):])

        if not os.path.exists(ref):
            raise ModelSchemaError("", f"model file not found: {ref}")
        file_format = self.FILE_FORMATS.get(os.path.splitext(ref)[1].lower(), "json")
        try:
            with open(ref, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) if file_format == "yaml" else json.load(f)
        except (json.JSONDecodeError, yaml.YAMLError, UnicodeDecodeError) as e:
            raise ModelSchemaError("", f"cannot parse {ref}: {e}") from e
        except OSError as e:
            raise ModelSchemaError("", f"cannot read {ref}: {e}") from e

        logger.debug(f"Loaded model document {ref}")
        return self.from_dict(data, check=check)

    def from_gallery(self, name: str) -> ManifoldModel:
        parts = name.split(":")
        kind, args = parts[0].lower(), parts[1:]
        try:
            if kind == "cp2" and len(args) <= 1:
                return make_cp2(parse_rational(args[0]) if args else 1)
            if kind == "s2xs2" and len(args) == 2:
                return make_s2xs2(parse_rational(args[0]), parse_rational(args[1]))
            if kind == "ruled" and len(args) == 3:
                genus = parse_rational(args[0])
                if genus.denominator != 1:
                    raise ModelSchemaError("genus", f"genus must be an integer, got {args[0]}")
                return make_ruled(int(genus), parse_rational(args[1]), parse_rational(args[2]))
            if kind == "enriques" and not args:
                return enriques_like()
        except RationalFormatError as e:
            raise ModelSchemaError(GALLERY_PREFIX + name, str(e)) from e
        raise ModelSchemaError(
            GALLERY_PREFIX + name,
            "unknown gallery model (expected cp2[:s], s2xs2:a:b, ruled:g:b:a or enriques)",
        )

    def from_dict(self, data: Any, check: bool = True) -> ManifoldModel:
        if not isinstance(data, dict):
            raise ModelSchemaError("", "model document must be an object")

        pairing = self._pairing(data.get("pairing"))
        n = len(pairing)
        if "rank" in data and data["rank"] != n:
            raise ModelSchemaError("rank", f"rank {data['rank']} does not match the {n}x{n} pairing")

        labels = data.get("labels")
        if labels is not None:
            if not isinstance(labels, list) or len(labels) != n or not all(isinstance(x, str) for x in labels):
                raise ModelSchemaError("labels", f"expected {n} strings")
            labels = tuple(labels)

        name = data.get("name", "model")
        if not isinstance(name, str):
            raise ModelSchemaError("name", "expected a string")

        model = ManifoldModel(
            lattice=IntersectionLattice(tuple(tuple(r) for r in pairing), labels or ()),
            c1=CohomologyFunctional(self._rationals(data.get("c1"), "c1", n)),
            omega=CohomologyFunctional(self._rationals(data.get("omega"), "omega", n)),
            flags=self._flags(data.get("flags", {})),
            builtin=self._builtin(data.get("builtin"), "builtin"),
            name=name,
        )
        if model.builtin is not None:
            self._check_builtin(model)
        return require_valid(model) if check else model

    def to_dict(self, model: ManifoldModel) -> Dict[str, Any]:
        data = {
            "name": model.name,
            "rank": model.rank,
            "labels": list(model.lattice.basis_labels),
            "pairing": [[int(x) for x in row] for row in model.lattice.pairing],
            "c1": [format_rational(v) for v in model.c1.values],
            "omega": [format_rational(v) for v in model.omega.values],
            "flags": {key: getattr(model.flags, key) for key in self.FLAG_KEYS},
        }
        if model.builtin is not None:
            data["builtin"] = self._tag_to_dict(model.builtin)
        return data

    def _pairing(self, value: Any) -> List[List[int]]:
        if not isinstance(value, list) or not value:
            raise ModelSchemaError("pairing", "expected a non-empty square integer matrix")
        n = len(value)
        for i, row in enumerate(value):
            if not isinstance(row, list) or len(row) != n:
                raise ModelSchemaError(f"pairing[{i}]", f"expected a row of length {n}")
            for j, x in enumerate(row):
                if isinstance(x, bool) or not isinstance(x, int):
                    raise ModelSchemaError(f"pairing[{i}][{j}]", f"expected an integer, got {x!r}")
        return value

    def _rationals(self, value: Any, path: str, n: int) -> tuple:
        if not isinstance(value, list) or len(value) != n:
            raise ModelSchemaError(path, f"expected a list of {n} rationals")
        out = []
        for i, x in enumerate(value):
            try:
                out.append(parse_rational(x))
            except RationalFormatError as e:
                raise ModelSchemaError(f"{path}[{i}]", str(e)) from e
        return tuple(out)

    def _flags(self, value: Any) -> ModelFlags:
        if not isinstance(value, dict):
            raise ModelSchemaError("flags", "expected an object")
        for key, flag in value.items():
            if key not in self.FLAG_KEYS:
                raise ModelSchemaError(f"flags.{key}", "unknown flag")
            if not isinstance(flag, bool):
                raise ModelSchemaError(f"flags.{key}", "expected true or false")
        return ModelFlags(**value)

    def _builtin(self, value: Any, path: str) -> Optional[BuiltinTag]:
        if value is None:
            return None
        if not isinstance(value, dict):
            raise ModelSchemaError(path, "expected an object")
        try:
            kind = BuiltinKind(value.get("kind"))
        except ValueError:
            raise ModelSchemaError(f"{path}.kind", f"unknown family {value.get('kind')!r}")
        params = value.get("params", [])
        if not isinstance(params, list):
            raise ModelSchemaError(f"{path}.params", "expected a list")
        try:
            params = tuple(parse_rational(p) for p in params)
        except RationalFormatError as e:
            raise ModelSchemaError(f"{path}.params", str(e)) from e
        base = self._builtin(value.get("base"), f"{path}.base")
        return BuiltinTag(kind, params, base)

    def _tag_to_dict(self, tag: BuiltinTag) -> Dict[str, Any]:
        data = {"kind": tag.kind.value, "params": [format_rational(p) for p in tag.params]}
        if tag.base is not None:
            data["base"] = self._tag_to_dict(tag.base)
        return data

    def _rebuild(self, tag: BuiltinTag, path: str) -> ManifoldModel:
        expected = {BuiltinKind.CP2: 1, BuiltinKind.S2XS2: 2, BuiltinKind.RULED: 3, BuiltinKind.BLOWUP: 1}
        if len(tag.params) != expected[tag.kind]:
            raise ModelSchemaError(f"{path}.params", f"expected {expected[tag.kind]} parameters")
        if tag.kind is BuiltinKind.CP2:
            return make_cp2(tag.scale)
        if tag.kind is BuiltinKind.S2XS2:
            return make_s2xs2(tag.alpha, tag.beta)
        if tag.kind is BuiltinKind.RULED:
            return make_ruled(tag.genus, tag.beta, tag.alpha)
        if tag.base is None or tag.base.kind is BuiltinKind.BLOWUP:
            raise ModelSchemaError(f"{path}.base", "a blow-up needs a CP2, S2XS2 or RULED base")
        return blow_up(self._rebuild(tag.base, f"{path}.base"), tag.points).model

    def _check_untagged_blowup(self, model: ManifoldModel):
        """The last `points` basis classes must be exceptional spheres of area 0"""
        tag = model.builtin
        if len(tag.params) != 1 or tag.params[0].denominator != 1 or not 0 < tag.points < model.rank:
            raise ModelSchemaError("builtin.params", f"expected a point count below rank {model.rank}")
        pairing = model.lattice.pairing
        for i in range(model.rank - tag.points, model.rank):
            expected_row = tuple(-1 if j == i else 0 for j in range(model.rank))
            if tuple(pairing[i]) != expected_row:
                raise ModelSchemaError(f"pairing[{i}]", "not an exceptional class of the blow-up")
            if model.c1.values[i] != 1:
                raise ModelSchemaError(f"c1[{i}]", "must be 1 on an exceptional class")
            if model.omega.values[i] != 0:
                raise ModelSchemaError(f"omega[{i}]", "must be 0 on an exceptional class")

    def _check_builtin(self, model: ManifoldModel):
        """A tagged document must agree with the family it names"""
        if model.builtin.kind is BuiltinKind.BLOWUP and model.builtin.base is None:
            self._check_untagged_blowup(model)
            return
        reference = self._rebuild(model.builtin, "builtin")
        if model.lattice.pairing != reference.lattice.pairing:
            raise ModelSchemaError("pairing", f"does not match the {model.builtin.kind.value} family")
        if model.c1 != reference.c1:
            raise ModelSchemaError("c1", f"does not match the {model.builtin.kind.value} family")
        if model.omega != reference.omega:
            raise ModelSchemaError("omega", f"does not match the {model.builtin.kind.value} family")


# Global loader instance
model_loader = ModelLoader()


def load_model(ref: str) -> ManifoldModel:
    return model_loader.load(ref)


def model_from_dict(data: Any) -> ManifoldModel:
    return model_loader.from_dict(data)


def model_to_dict(model: ManifoldModel) -> Dict[str, Any]:
    return model_loader.to_dict(model)

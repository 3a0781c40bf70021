"""JSON project manifest: host references plus one record per (defect, charge).

The schema lives in ``defectkit/data/manifest.schema.json``.  Relative file
paths are resolved against the manifest's directory and must exist.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from ..errors import MissingArtifact, SchemaError

DEFAULT_REFRACTIVE_INDEX = 2.1
DEFAULT_DH_FORM = -2.84
DEFAULT_RICH_ORDER = ("N", "B")


def manifest_schema() -> dict:
    text = resources.files("defectkit").joinpath("data/manifest.schema.json").read_text()
    return json.loads(text)


_VALIDATOR = None


def _validator():
    global _VALIDATOR
    if _VALIDATOR is None:
        _VALIDATOR = jsonschema.Draft202012Validator(manifest_schema())
    return _VALIDATOR


@dataclass(frozen=True)
class HostBlock:
    E_bulk: float
    E_vbm: float
    E_gap: float
    mu_ref: dict
    dH_form: float = DEFAULT_DH_FORM
    refractive_index: float = DEFAULT_REFRACTIVE_INDEX
    rich_order: tuple = DEFAULT_RICH_ORDER
    supercell_lattice: list | None = None
    dielectric: object = None


@dataclass(frozen=True)
class DefectRecord:
    label: str
    charge: int
    E_tot: float
    n: dict
    correction: dict | None = None
    multiplicity: str | None = None
    point_group: str | None = None
    gap_states: list | None = None
    zpl: dict | None = None
    intermediate_triplet: float | None = None
    zfs: dict | None = None
    hyperfine: list | None = None
    S: float | None = None
    transition: dict | None = None
    nuclei: list | None = None
    files: dict = field(default_factory=dict)

    @property
    def key(self) -> tuple:
        return (self.label, self.charge)


@dataclass(frozen=True)
class ProjectManifest:
    host: HostBlock
    defects: tuple
    base_dir: Path | None = None
    name: str = ""

    def labels(self) -> list:
        return sorted({d.label for d in self.defects})

    def entries_for(self, label: str) -> list:
        return [d for d in self.defects if d.label == label]

    def find(self, label: str, charge: int) -> DefectRecord:
        for d in self.defects:
            if d.label == label and d.charge == charge:
                return d
        raise KeyError(f"no manifest entry for {label} q={charge:+d}")


def _path_str(err) -> str:
    return "/" + "/".join(str(p) for p in err.absolute_path)


def _resolve(base: Path | None, rel: str, where: str) -> Path:
    p = Path(rel)
    if not p.is_absolute() and base is not None:
        p = base / p
    if not p.is_file():
        raise MissingArtifact(p)
    return p


def load_manifest(text: str, base_dir=None) -> ProjectManifest:
    """Parse and validate manifest JSON; defaults fill n_r and dH_form."""
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    errors = sorted(_validator().iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, _path_str(err))

    base = Path(base_dir) if base_dir is not None else None
    h = data["host"]
    rich = tuple(h.get("rich_order", DEFAULT_RICH_ORDER))
    for el in rich:
        if el not in h["mu_ref"]:
            raise SchemaError(f"rich_order element {el!r} has no reference chemical potential", "/host/rich_order")
    host = HostBlock(
        E_bulk=float(h["E_bulk"]),
        E_vbm=float(h["E_vbm"]),
        E_gap=float(h["E_gap"]),
        mu_ref={k: float(v) for k, v in h["mu_ref"].items()},
        dH_form=float(h.get("dH_form", DEFAULT_DH_FORM)),
        refractive_index=float(h.get("refractive_index", DEFAULT_REFRACTIVE_INDEX)),
        rich_order=rich,
        supercell_lattice=h.get("supercell_lattice"),
        dielectric=h.get("dielectric"),
    )

    records = []
    seen = set()
    for i, d in enumerate(data.get("defects", [])):
        where = f"/defects/{i}"
        key = (d["label"], int(d["charge"]))
        if key in seen:
            raise SchemaError(f"duplicate entry for {key[0]} q={key[1]:+d}", where)
        seen.add(key)
        zpl = d.get("zpl")
        if zpl is not None and "E_zpl" not in zpl and not ("E_excited" in zpl and "E_ground" in zpl):
            raise SchemaError("zpl needs E_zpl or both E_excited and E_ground", where + "/zpl")
        files = {}
        for name, value in d.get("files", {}).items():
            if name == "orbitals":
                files[name] = [
                    {**o, "path": _resolve(base, o["path"], f"{where}/files/orbitals/{j}")}
                    for j, o in enumerate(value)
                ]
            elif name == "spin_density_block":
                files[name] = int(value)
            else:
                files[name] = _resolve(base, value, f"{where}/files/{name}")
        records.append(
            DefectRecord(
                label=d["label"],
                charge=int(d["charge"]),
                E_tot=float(d["E_tot"]),
                n={k: int(v) for k, v in d["n"].items()},
                correction=d.get("correction"),
                multiplicity=d.get("multiplicity"),
                point_group=d.get("point_group"),
                gap_states=d.get("gap_states"),
                zpl=zpl,
                intermediate_triplet=d.get("intermediate_triplet"),
                zfs=d.get("zfs"),
                hyperfine=d.get("hyperfine"),
                S=d.get("S"),
                transition=d.get("transition"),
                nuclei=d.get("nuclei"),
                files=files,
            )
        )
    return ProjectManifest(host, tuple(records), base, data.get("name", ""))


def read_manifest(path) -> ProjectManifest:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact(path)
    return load_manifest(path.read_text(encoding="utf-8"), base_dir=path.parent)

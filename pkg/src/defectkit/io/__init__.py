"""Readers and writers for structures, volumetric grids, wavefunctions and manifests."""

from .manifest import DefectRecord, HostBlock, ProjectManifest, load_manifest, read_manifest
from .structure import parse_structure, write_structure
from .volumetric import VolumetricGrid, parse_volumetric, write_volumetric
from .wavefunction import KBlock, WavefunctionSet, read_wavefunctions, write_wavefunctions

__all__ = [
    "DefectRecord",
    "HostBlock",
    "KBlock",
    "ProjectManifest",
    "VolumetricGrid",
    "WavefunctionSet",
    "load_manifest",
    "parse_structure",
    "parse_volumetric",
    "read_manifest",
    "read_wavefunctions",
    "write_structure",
    "write_volumetric",
    "write_wavefunctions",
]

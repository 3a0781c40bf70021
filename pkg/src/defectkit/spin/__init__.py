"""Hyperfine and zero-field-splitting tensors."""

from .hyperfine import (
    HyperfineTensor,
    NucleusSpec,
    dipole_dipole_tensor,
    fermi_contact,
    hyperfine_tensor,
)
from .isotopes import isotope_data
from .zfs import OrbitalPairSet, ZfsTensor, zfs_parameters, zfs_tensor, zfs_tensor_direct

__all__ = [
    "HyperfineTensor",
    "NucleusSpec",
    "OrbitalPairSet",
    "ZfsTensor",
    "dipole_dipole_tensor",
    "fermi_contact",
    "hyperfine_tensor",
    "isotope_data",
    "zfs_parameters",
    "zfs_tensor",
    "zfs_tensor_direct",
]

"""Exact computations with bounded chain complexes of finitely presented
modules over Z and Z/n: homology, Hom complexes, Ext^1, complex classes,
approximation sequences and filtrations."""

from .complexes import ChainComplex, ChainMap, disk, homology, is_exact, sphere, suspension
from .ext import ext1_ch, ext1_dw
from .linalg import ZZ, Mat, Ring, Zmod, smith_normal_form
from .modules import FpModule, ModuleHom, ext1_module

__version__ = "0.1.0"

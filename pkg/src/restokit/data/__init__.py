"""Image and dataset plumbing: pixmap I/O, scenes, patches, manifests."""

from .manifest import ROLES, SPLITS, DatasetManifest, ManifestError, build_manifest
from .patches import PatchSpec, extract_patches, grid_positions
from .pnm import PnmError, read_image, write_image
from .scenes import gen_scene, gen_scenes

__all__ = [
    "ROLES", "SPLITS", "DatasetManifest", "ManifestError", "build_manifest",
    "PatchSpec", "extract_patches", "grid_positions",
    "PnmError", "read_image", "write_image",
    "gen_scene", "gen_scenes",
]

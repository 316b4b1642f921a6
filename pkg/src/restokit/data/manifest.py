"""Dataset manifests: role-tagged file lists with train/val/test splits.

On-disk format is line-oriented plain text.  First line records the
master seed; every following line is `role<TAB>split<TAB>path`.
"""

import os
from dataclasses import dataclass, field

import numpy as np

ROLES = ("clean", "synthetic_degraded", "real_degraded", "surrogate",
         "unpaired_clean")
SPLITS = ("train", "val", "test")


class ManifestError(Exception):
    pass


@dataclass
class DatasetManifest:
    master_seed: int = 0
    entries: list = field(default_factory=list)   # (role, split, path)
    base: str = ""       # relative entries resolve against this directory

    def _resolve(self, path):
        if self.base and not os.path.isabs(path):
            return os.path.join(self.base, path)
        return path

    def files(self, role, split=None):
        return [self._resolve(p) for r, s, p in self.entries
                if r == role and (split is None or s == split)]

    def validate(self, check_exists=True):
        for role, split, path in self.entries:
            if role not in ROLES:
                raise ManifestError(f"unknown role {role!r}")
            if split not in SPLITS:
                raise ManifestError(f"unknown split {split!r}")
            if check_exists and not os.path.exists(self._resolve(path)):
                raise ManifestError(f"listed file missing: {path}")
        for role in ROLES:
            per_split = [set(self.files(role, s)) for s in SPLITS]
            for i in range(len(per_split)):
                for j in range(i + 1, len(per_split)):
                    if per_split[i] & per_split[j]:
                        raise ManifestError(
                            f"role {role}: splits overlap on "
                            f"{sorted(per_split[i] & per_split[j])[:3]}")

    def save(self, path):
        tmp = f"{path}.tmp"
        with open(tmp, "w") as f:
            f.write(f"# master_seed {self.master_seed}\n")
            for role, split, file_path in self.entries:
                f.write(f"{role}\t{split}\t{file_path}\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path):
        manifest = cls(base=os.path.dirname(os.path.abspath(path)))
        with open(path) as f:
            first = f.readline().strip()
            if not first.startswith("# master_seed "):
                raise ManifestError(f"{path}: missing master_seed header")
            manifest.master_seed = int(first.split()[-1])
            for line_no, line in enumerate(f, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ManifestError(f"{path}:{line_no}: malformed line")
                manifest.entries.append(tuple(parts))
        return manifest


def split_counts(total, fractions):
    """Largest-remainder apportioning so counts sum exactly to total."""
    raw = [f * total for f in fractions]
    counts = [int(np.floor(r)) for r in raw]
    remainder = total - sum(counts)
    order = np.argsort([c - r for c, r in zip(counts, raw)])
    for i in range(remainder):
        counts[order[i]] += 1
    return counts


def build_manifest(role_dirs, fractions, seed):
    """Shuffle each role's files deterministically and split them.

    role_dirs: {role: directory}; fractions: (train, val, test) summing
    to 1.  Files are matched by sorted name before shuffling.
    """
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ManifestError(f"split fractions must sum to 1, got {fractions}")
    manifest = DatasetManifest(master_seed=seed)
    for role, directory in role_dirs.items():
        if role not in ROLES:
            raise ManifestError(f"unknown role {role!r}")
        names = sorted(os.listdir(directory))
        if not names:
            raise ManifestError(f"role {role}: no files in {directory}")
        paths = [os.path.join(directory, n) for n in names]
        rng = np.random.default_rng(seed)
        order = rng.permutation(len(paths))
        counts = split_counts(len(paths), fractions)
        offsets = np.cumsum([0] + counts)
        for split, lo, hi in zip(SPLITS, offsets[:-1], offsets[1:]):
            for k in order[lo:hi]:
                manifest.entries.append((role, split, paths[k]))
    manifest.validate()
    return manifest

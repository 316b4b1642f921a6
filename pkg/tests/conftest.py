"""Pin numeric libraries to one thread before numpy loads.

The reproducibility contract (bit-identical reruns) is stated at thread
count 1; setting this here covers every test module regardless of how
pytest was invoked.
"""

import os

for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")

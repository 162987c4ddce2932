import numpy as np
import pytest

from perfgate.profiles import BlobSpec, SyntheticSpec, generate_synthetic
from perfgate.stats import FeatureMatrix


def two_blob_spec(count=60):
    return SyntheticSpec(
        blobs=(
            BlobSpec(
                count=count,
                input_size=(1000.0, 30.0),
                statements=(5000.0, 60.0),
                iterations=(2000.0, 80.0),
                function_calls=(400.0, 15.0),
                conditionals=(200.0, 10.0),
                memory=(512.0, 20.0),
            ),
            BlobSpec(
                count=count,
                input_size=(8000.0, 120.0),
                statements=(20000.0, 150.0),
                iterations=(9000.0, 200.0),
                function_calls=(1800.0, 40.0),
                conditionals=(900.0, 25.0),
                memory=(2048.0, 60.0),
            ),
        ),
        time_coef=0.01,
        time_noise=0.3,
    )


# Five blobs with pairwise-equidistant means: blob i is offset on the i-th
# of five attributes (a 4-simplex), so the distortion curve falls linearly
# until k=5 and then flattens hard.
FIVE_BLOB_FEATURES = ("input_size", "memory", "iterations", "function_calls", "conditionals")


def five_blob_spec(count=50, offset=1000.0, spread=5.0):
    blobs = []
    for i in range(5):
        means = {name: (2000.0, spread) for name in FIVE_BLOB_FEATURES}
        name = FIVE_BLOB_FEATURES[i]
        means[name] = (2000.0 + offset, spread)
        blobs.append(BlobSpec(count=count, statements=(5000.0, 50.0), **means))
    return SyntheticSpec(blobs=tuple(blobs), time_coef=0.01, time_noise=0.2)


@pytest.fixture
def two_blob_snapshot():
    return generate_synthetic(two_blob_spec(), seed=7, commit_id="base")


def matrix_from_points(points, features=("x", "y", "z")):
    """Build a FeatureMatrix directly from raw coordinates (already scaled)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
        features = features[:1]
    return FeatureMatrix(
        input_ids=tuple(f"p{i}" for i in range(len(pts))),
        features=tuple(features[: pts.shape[1]]),
        values=pts,
    )

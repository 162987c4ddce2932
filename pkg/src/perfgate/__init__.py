"""perfgate: cluster-based test-input minimization and performance-test
gating for CI."""

__version__ = "0.1.0"

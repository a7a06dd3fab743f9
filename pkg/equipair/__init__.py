"""Two-step pairwise assembly of point clouds under SE(3)."""

__version__ = "0.1.0"

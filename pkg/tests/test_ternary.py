"""Barycentric projection and SVG output for 3-label trajectories."""

import re

import numpy as np
import pytest

from simplexflow.errors import DimensionError, DomainError
from simplexflow.ternary import project, trajectory_svg


class TestProject:
    def test_vertices_map_to_triangle_corners(self):
        corners = project(np.eye(3))
        np.testing.assert_allclose(corners[0], [0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(corners[1], [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(corners[2], [0.5, np.sqrt(3) / 2], atol=1e-15)

    def test_uniform_maps_to_centroid(self):
        centroid = project([np.full(3, 1 / 3)])[0]
        np.testing.assert_allclose(centroid, [0.5, np.sqrt(3) / 6], atol=1e-12)

    def test_rejects_wrong_width(self):
        with pytest.raises(DimensionError):
            project([[0.5, 0.5]])

    def test_rejects_off_simplex(self):
        with pytest.raises(DomainError):
            project([[0.5, 0.6, 0.2]])


class TestSvg:
    @staticmethod
    def _polyline_points(svg: str) -> np.ndarray:
        match = re.search(r'<polyline points="([^"]+)"', svg)
        assert match is not None
        return np.array(
            [[float(v) for v in pair.split(",")] for pair in match.group(1).split()]
        )

    def test_path_points_stay_inside_triangle(self):
        rng = np.random.default_rng(2)
        raw = rng.dirichlet(np.ones(3), size=50)
        svg = trajectory_svg(raw, size=400, margin=40)
        pts = self._polyline_points(svg)
        span = 400 - 80
        # Barycentric bounds in screen space: inside the corner triangle.
        x = (pts[:, 0] - 40) / span
        y = (400 - 40 - pts[:, 1]) / span
        b3 = y / (np.sqrt(3) / 2)
        b2 = x - 0.5 * b3
        b1 = 1.0 - b2 - b3
        eps = 1e-6
        assert np.all(b1 >= -eps) and np.all(b2 >= -eps) and np.all(b3 >= -eps)

    def test_marks_start_point_and_labels(self):
        svg = trajectory_svg([[1 / 3, 1 / 3, 1 / 3], [0.5, 0.25, 0.25]])
        assert "<circle" in svg
        for label in (">1<", ">2<", ">3<"):
            assert label in svg

"""Static SVG rendering of 3-label probability trajectories.

A distribution over three labels is a barycentric coordinate in the
triangle with the three pure labels at its corners, so a trajectory on the
simplex projects to a planar curve inside that triangle.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError

_SQRT3_2 = np.sqrt(3.0) / 2.0


def project(points) -> np.ndarray:
    """Map rows (y1, y2, y3) with unit sum to 2-d triangle coordinates.

    Vertex 1 sits at (0, 0), vertex 2 at (1, 0), vertex 3 at the apex
    (1/2, sqrt(3)/2).  Convex combinations land inside the triangle.
    """
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.shape[1] != 3:
        raise DimensionError(f"need 3 coordinates per point, got {arr.shape[1]}")
    if np.any(np.abs(arr.sum(axis=1) - 1.0) > 1e-6) or np.any(arr < -1e-9):
        raise DomainError("points must lie on the 3-label probability simplex")
    x = arr[:, 1] + 0.5 * arr[:, 2]
    y = _SQRT3_2 * arr[:, 2]
    return np.stack([x, y], axis=1)


def trajectory_svg(points, size: int = 480, margin: int = 40, title: str = "") -> str:
    """SVG document showing a simplex trajectory with labeled corners and a
    marker on the initial point."""
    xy = project(points)
    span = size - 2 * margin
    px = margin + xy[:, 0] * span
    # Flip so the apex (label 3) points up in screen coordinates.
    py = size - margin - xy[:, 1] * span

    corners = project(np.eye(3))
    cx = margin + corners[:, 0] * span
    cy = size - margin - corners[:, 1] * span
    triangle = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(cx, cy))
    path = " ".join(f"{x:.3f},{y:.3f}" for x, y in zip(px, py))
    label_offsets = [(-14, 16), (14, 16), (0, -10)]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<polygon points="{triangle}" fill="none" stroke="#444" stroke-width="1.5"/>',
        f'<polyline points="{path}" fill="none" stroke="#0a6" stroke-width="1.6"/>',
        f'<circle cx="{px[0]:.3f}" cy="{py[0]:.3f}" r="5" fill="black"/>',
    ]
    for i, ((dx, dy), x, y) in enumerate(zip(label_offsets, cx, cy)):
        parts.append(
            f'<text x="{x + dx:.1f}" y="{y + dy:.1f}" font-size="16" '
            f'text-anchor="middle" font-family="sans-serif">{i + 1}</text>'
        )
    if title:
        parts.append(
            f'<text x="{size / 2:.0f}" y="{margin / 2:.0f}" font-size="14" '
            f'text-anchor="middle" font-family="sans-serif">{title}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def save_trajectory_svg(points, path, **kwargs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(trajectory_svg(points, **kwargs))
        fh.write("\n")

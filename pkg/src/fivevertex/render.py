"""SVG and PPM pictures of configurations.

Row t = 1 is drawn at the bottom.  Each path is one polyline running from the
bottom boundary to the top boundary through the centres of its corner
vertices.  Output is a pure function of (configuration, spec, style).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    EMPTY,
    HORIZONTAL,
    TURN_RIGHT,
    TURN_UP,
    VERTICAL,
    Configuration,
    LatticeSpec,
    vertex_grid,
)

PALETTE = {
    EMPTY: (255, 255, 255),
    VERTICAL: (120, 160, 220),
    HORIZONTAL: (230, 170, 90),
    TURN_UP: (200, 60, 60),
    TURN_RIGHT: (60, 150, 80),
}


@dataclass(frozen=True)
class Style:
    cell: int = 12
    line_width: float = 3.0
    color_vertices: bool = False
    grid: bool = True
    path_color: str = "#111111"
    palette: dict = field(default_factory=lambda: dict(PALETTE))


def path_points(config: Configuration, spec: LatticeSpec, i: int) -> list[tuple[float, float]]:
    """Corner points of path i in lattice units (column, row); rows 0 and M+1 are the boundary."""
    s = config.slices
    pts = [(float(s[0][i]), 0.5)]
    for t in range(1, spec.M + 1):
        a, b = s[t - 1][i], s[t][i]
        if a != b:
            pts.append((float(a), float(t)))
            pts.append((float(b), float(t)))
    pts.append((float(s[spec.M][i]), spec.M + 0.5))
    return pts


def _hex(rgb: tuple[int, int, int]) -> str:
    return "#%02x%02x%02x" % rgb


def render_svg(config: Configuration, spec: LatticeSpec, style: Style = Style()) -> bytes:
    config.validate(spec)
    cs = style.cell
    width, height = spec.L * cs, spec.M * cs
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if style.color_vertices:
        grid = vertex_grid(config, spec)
        for t in range(spec.M):
            for j in range(spec.L):
                v = grid[t][j]
                if v == EMPTY:
                    continue
                y = (spec.M - 1 - t) * cs
                out.append(f'<rect x="{j * cs}" y="{y}" width="{cs}" height="{cs}" '
                           f'fill="{_hex(style.palette[v])}"/>')
    if style.grid:
        for j in range(spec.L):
            x = (j + 0.5) * cs
            out.append(f'<line x1="{x:g}" y1="0" x2="{x:g}" y2="{height}" stroke="#dddddd" stroke-width="1"/>')
        for t in range(spec.M):
            y = (t + 0.5) * cs
            out.append(f'<line x1="0" y1="{y:g}" x2="{width}" y2="{y:g}" stroke="#dddddd" stroke-width="1"/>')

    def to_px(col: float, row: float) -> str:
        return f"{(col - 0.5) * cs:g},{(spec.M - row + 0.5) * cs:g}"

    for i in range(spec.N):
        pts = " ".join(to_px(c, r) for c, r in path_points(config, spec, i))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{style.path_color}" '
                   f'stroke-width="{style.line_width:g}" stroke-linejoin="round"/>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("ascii")


def render_ppm(config: Configuration, spec: LatticeSpec, style: Style = Style()) -> bytes:
    """Binary PPM with one colour block per vertex, coloured by vertex type."""
    config.validate(spec)
    cs = style.cell
    grid = vertex_grid(config, spec)
    width, height = spec.L * cs, spec.M * cs
    rows = []
    for t in range(spec.M - 1, -1, -1):
        line = b"".join(bytes(style.palette[v]) * cs for v in grid[t])
        rows.extend([line] * cs)
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + b"".join(rows)


def render(config: Configuration, spec: LatticeSpec, fmt: str = "svg", style: Style = Style()) -> bytes:
    if fmt == "svg":
        return render_svg(config, spec, style)
    if fmt == "ppm":
        return render_ppm(config, spec, style)
    raise ValueError(f"unsupported format {fmt!r}; use 'svg' or 'ppm'")

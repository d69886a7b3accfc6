"""ASCII and SVG renderings of patches."""

from html import escape
from typing import List

from .textile import Patch, Tile


def _cell_width(patch: Patch) -> int:
    width = 3
    for column in patch.grid:
        for tile in column:
            if tile is not None:
                width = max(
                    width,
                    len(tile.top) + 2,
                    len(tile.left) + len(tile.right) + 1,
                    len(tile.bottom) + 2,
                )
    return width


def _tile_block(tile: Tile, width: int) -> List[str]:
    return [
        f"⌜{tile.top}⌝".center(width),
        f"{tile.left}·{tile.right}".center(width),
        f"⌞{tile.bottom}⌟".center(width),
    ]


def render_ascii(patch: Patch) -> str:
    """Three text lines per tile row, top row first; empty cells are blank."""
    width = _cell_width(patch)
    blank = [" " * width] * 3
    lines: List[str] = []
    for y in range(patch.height - 1, -1, -1):
        blocks = []
        for x in range(patch.width):
            tile = patch.grid[x][y]
            blocks.append(blank if tile is None else _tile_block(tile, width))
        for row in range(3):
            lines.append(" ".join(block[row] for block in blocks).rstrip())
    return "\n".join(lines) + "\n"


def render_svg(patch: Patch, cell_size: int = 96) -> str:
    """Self-contained SVG: one rect and four edge labels per tile."""
    font = max(cell_size // 8, 8)
    margin = font + 2
    width = patch.width * cell_size
    height = patch.height * cell_size
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    text_style = f"font-family:monospace;font-size:{font}px;fill:#000"
    for y in range(patch.height - 1, -1, -1):
        for x in range(patch.width):
            tile = patch.grid[x][y]
            if tile is None:
                continue
            left = x * cell_size
            top = (patch.height - 1 - y) * cell_size
            centre_x = left + cell_size // 2
            centre_y = top + cell_size // 2
            i, j = patch.origin[0] + x, patch.origin[1] + y
            out.append(f'<g id="tile-{i}-{j}">')
            out.append(
                f'<rect x="{left}" y="{top}" width="{cell_size}" height="{cell_size}" '
                'style="fill:#fff;stroke:#000;stroke-width:1"/>'
            )
            labels = [
                (centre_x, top + margin, "middle", tile.top),
                (left + cell_size - 4, centre_y, "end", tile.right),
                (left + 4, centre_y, "start", tile.left),
                (centre_x, top + cell_size - 4, "middle", tile.bottom),
            ]
            for tx, ty, anchor, label in labels:
                out.append(
                    f'<text x="{tx}" y="{ty}" text-anchor="{anchor}" '
                    f'style="{text_style}">{escape(label)}</text>'
                )
            out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"

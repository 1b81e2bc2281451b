#!/usr/bin/env python3
"""Writes the block-letter "CPT" test raster used by the image-cloning scenario."""

import sys

GLYPHS = {
    "C": [".####", "#....", "#....", "#....", "#....", "#....", ".####"],
    "P": ["####.", "#...#", "#...#", "####.", "#....", "#....", "#...."],
    "T": ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."],
}


def render(text="CPT", cell=8, margin=1, gap=1):
    cols = margin * 2 + len(text) * 5 + (len(text) - 1) * gap
    rows = margin * 2 + 7
    grid = [[0] * cols for _ in range(rows)]
    x0 = margin
    for ch in text:
        for r, line in enumerate(GLYPHS[ch]):
            for c, mark in enumerate(line):
                if mark == "#":
                    grid[margin + r][x0 + c] = 255
        x0 += 5 + gap
    width, height = cols * cell, rows * cell
    pixels = bytearray(width * height)
    for y in range(height):
        for x in range(width):
            pixels[y * width + x] = grid[y // cell][x // cell]
    return width, height, bytes(pixels)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "cpt.pgm"
    width, height, pixels = render()
    with open(out, "wb") as f:
        f.write(b"P5\n# CPT block letters\n%d %d\n255\n" % (width, height))
        f.write(pixels)


if __name__ == "__main__":
    main()

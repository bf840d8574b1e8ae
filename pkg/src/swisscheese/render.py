"""Deterministic SVG 1.1 output for blocks, chains and cheeses.

Coordinates are written with a fixed number of decimals from the exact
values, so identical geometry gives identical bytes.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .geometry import QPoint

DECIMALS = 6
PX = 200  # pixels per unit


def num(x) -> str:
    n = round(Fraction(x) * PX * 10**DECIMALS)  # exact, half-to-even
    sign = "-" if n < 0 else ""
    whole, frac = divmod(abs(n), 10**DECIMALS)
    if not frac:
        return f"{sign}{whole}" if whole else "0"
    return f"{sign}{whole}." + f"{frac:0{DECIMALS}d}".rstrip("0")


def _pt(z: QPoint) -> str:
    # SVG y grows downward
    return f"{num(z.re)},{num(-z.im)}"


def _polygon(points, cls: str) -> str:
    return f'<polygon class="{cls}" points="{" ".join(_pt(p) for p in points)}"/>'


def _circle(center: QPoint, radius, cls: str) -> str:
    return f'<circle class="{cls}" cx="{num(center.re)}" cy="{num(-center.im)}" r="{num(radius)}"/>'


def _line(a: QPoint, b: QPoint, cls: str) -> str:
    return f'<line class="{cls}" x1="{num(a.re)}" y1="{num(-a.im)}" x2="{num(b.re)}" y2="{num(-b.im)}"/>'


STYLE = (
    ".block{fill:#d8d8d8;stroke:#000;stroke-width:0.5}"
    ".slit{fill:#fff;stroke:#000;stroke-width:0.3}"
    ".x0{fill:#c00}"
    ".outer{fill:#d8d8d8;stroke:#000;stroke-width:0.5}"
    ".hole{fill:#fff;stroke:#000;stroke-width:0.2}"
    ".candidate{fill:none;stroke:#888;stroke-width:0.4;stroke-dasharray:3,2}"
    ".target{stroke:#06c;stroke-width:1;fill:none}"
    ".targetfill{fill:#06c;fill-opacity:0.3;stroke:none}"
)


def _document(elements: list[str], box, title: str) -> str:
    x0, y0, x1, y1 = box
    pad = Fraction(1, 20)
    vb = f"{num(x0 - pad)} {num(-(y1 + pad))} {num(x1 - x0 + 2 * pad)} {num(y1 - y0 + 2 * pad)}"
    head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{vb}">\n'
            f"<title>{title}</title>\n<style>{STYLE}</style>\n")
    return head + "".join(e + "\n" for e in elements) + "</svg>\n"


def _bbox(points):
    xs = [p.re for p in points]
    ys = [p.im for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def block_elements(block) -> list[str]:
    out = [_polygon(block.vertices, "block")]
    out += [_polygon(block.slit_polygon(s), "slit") for s in block.slits]
    return out


def svg_block(block) -> str:
    return _document(block_elements(block), _bbox(block.vertices), "slit block")


def svg_chain(chain) -> str:
    els = [e for b in chain.blocks for e in block_elements(b)]
    els.append(_circle(chain.x0, Fraction(1, 50), "x0"))
    return _document(els, _bbox(chain.vertices()), f"slit chain, {len(chain.blocks)} blocks")


def _target_elements(target) -> list[str]:
    from .targets import CantorProduct, SlitChainSet, Union

    if target is None:
        return []
    if isinstance(target, Union):
        return [e for part in target.parts for e in _target_elements(part)]
    if isinstance(target, SlitChainSet):
        return [_polygon(p, "targetfill") for p in target.chain.polygons()]
    if isinstance(target, CantorProduct):
        c, d = target.imag
        s = target.svc.stage_count
        return [_polygon([QPoint(a, c), QPoint(b, c), QPoint(b, d), QPoint(a, d)], "targetfill")
                for a, b in target.svc.stages[s]]
    return [_line(a, b, "target") for a, b in target.segments()]


def svg_cheese(cheese) -> str:
    outer = cheese.outer
    els = [_circle(outer.center, outer.radius, "outer")]
    # candidate discs are outlined only; the holes themselves are the small discs
    els += [_circle(g.candidate.disc.center, g.candidate.disc.radius, "candidate") for g in cheese.groups]
    for D in cheese.deleted_discs():
        els.append(_circle(D.center, D.radius, "hole"))
    els += _target_elements(cheese.target)
    r = outer.radius
    box = (outer.center.re - r, outer.center.im - r, outer.center.re + r, outer.center.im + r)
    return _document(els, box, f"swiss cheese, {len(cheese.deleted_discs())} holes")


def svg_empty(title: str = "empty") -> str:
    return _document([], (Fraction(0), Fraction(0), Fraction(1), Fraction(1)), title)


def to_svg(geometry) -> str:
    from .cheese import SwissCheese
    from .slits import SlitBlock, SlitChain

    if geometry is None or (isinstance(geometry, (list, tuple)) and not geometry):
        return svg_empty()
    if isinstance(geometry, SlitBlock):
        return svg_block(geometry)
    if isinstance(geometry, SlitChain):
        return svg_chain(geometry)
    if isinstance(geometry, SwissCheese):
        return svg_cheese(geometry)
    raise TypeError(f"cannot render {type(geometry).__name__}")


def render_svg(geometry, path) -> Path:
    path = Path(path)
    path.write_bytes(to_svg(geometry).encode("utf-8"))
    return path

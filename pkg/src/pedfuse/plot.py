"""Top-down SVG plot of fused detections and ground truth over the AOI."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Sequence, Tuple

from .geometry import AreaOfInterest

SVG_NS = "http://www.w3.org/2000/svg"


def render_svg(
    detections: Sequence[Tuple[float, float]],
    ground_truth: Sequence[Tuple[float, float]],
    aoi: AreaOfInterest,
    scale: float = 20.0,
    margin: float = 20.0,
    title: str = "",
) -> str:
    """Return the SVG document as a string (world +Y points up)."""
    width = (aoi.x_max - aoi.x_min) * scale + 2 * margin
    height = (aoi.y_max - aoi.y_min) * scale + 2 * margin

    def to_px(X, Y):
        return margin + (X - aoi.x_min) * scale, margin + (aoi.y_max - Y) * scale

    svg = ET.Element(
        "svg",
        xmlns=SVG_NS,
        width=f"{width:.1f}",
        height=f"{height:.1f}",
        viewBox=f"0 0 {width:.1f} {height:.1f}",
    )
    if title:
        ET.SubElement(svg, "title").text = title
    ET.SubElement(
        svg,
        "rect",
        id="aoi",
        x=f"{margin:.1f}",
        y=f"{margin:.1f}",
        width=f"{(aoi.x_max - aoi.x_min) * scale:.1f}",
        height=f"{(aoi.y_max - aoi.y_min) * scale:.1f}",
        fill="none",
        stroke="black",
    )
    gt_group = ET.SubElement(svg, "g", id="ground_truth", fill="none", stroke="green")
    for X, Y in ground_truth:
        px, py = to_px(X, Y)
        ET.SubElement(gt_group, "circle", cx=f"{px:.2f}", cy=f"{py:.2f}", r="6")
    det_group = ET.SubElement(svg, "g", id="detections", fill="red", stroke="none")
    for X, Y in detections:
        px, py = to_px(X, Y)
        ET.SubElement(det_group, "circle", cx=f"{px:.2f}", cy=f"{py:.2f}", r="3")
    return ET.tostring(svg, encoding="unicode")


def emit_plot(
    detections: Sequence[Tuple[float, float]],
    ground_truth: Sequence[Tuple[float, float]],
    aoi: AreaOfInterest,
    path,
    **kwargs,
) -> Path:
    path = Path(path)
    path.write_text('<?xml version="1.0" encoding="UTF-8"?>\n' + render_svg(detections, ground_truth, aoi, **kwargs) + "\n",
                    encoding="utf-8")
    return path

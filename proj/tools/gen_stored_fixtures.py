#!/usr/bin/env python3
"""Writes the stored fixtures net220.json and tanzbrunnen.json."""

import json
import math
import pathlib
import sys


def net220():
    # 11 x 11 node grid: 2 * 11 * 10 = 220 cables, four corners and the centre fixed.
    # Hand-placed approximation; no reference coordinates exist.
    n = 11
    centre = (n // 2) * n + n // 2
    corner_z = {0: 0.0, n - 1: 4.0, n * (n - 1): 4.0, n * n - 1: 0.0}
    nodes = []
    for r in range(n):
        for c in range(n):
            i = r * n + c
            z = corner_z.get(i, 6.0 if i == centre else 2.0)
            nodes.append({"id": i, "xyz": [float(c), float(r), z], "fixed": i in corner_z or i == centre})
    members = []
    for r in range(n):
        for c in range(n):
            i = r * n + c
            if c + 1 < n:
                members.append([i, i + 1])
            if r + 1 < n:
                members.append([i, i + n])
    return {
        "version": "tensiform/1",
        "nodes": nodes,
        "functionals": [{"id": 0, "variant": "PowerLength", "params": {"w": 1.0, "p": 2}}],
        "members": [{"id": k, "endpoints": e, "role": "cable", "functional_id": 0} for k, e in enumerate(members)],
        "elements": [],
    }


def tanzbrunnen(sectors=24, rings=5, radius=10.0, mast=6.0, anchor_every=4):
    # Star-shaped suspended membrane on a central mast, anchored alternately
    # low and high around the perimeter. Hand-built approximation.
    nodes = [{"id": 0, "xyz": [0.0, 0.0, 0.0], "fixed": True},
             {"id": 1, "xyz": [0.0, 0.0, mast], "fixed": False}]

    def ring_node(k, s):
        return 2 + (k - 1) * sectors + s % sectors

    anchors = 0
    for k in range(1, rings + 1):
        for s in range(sectors):
            t = k / rings
            a = 2.0 * math.pi * s / sectors
            fixed = k == rings and s % anchor_every == 0
            z = mast * (1.0 - t) + 1.5 * t
            if fixed:
                z = 0.5 if anchors % 2 == 0 else 2.5
                anchors += 1
            nodes.append({"id": len(nodes), "xyz": [radius * t * math.cos(a), radius * t * math.sin(a), z], "fixed": fixed})

    elements = []
    for s in range(sectors):
        elements.append([1, ring_node(1, s), ring_node(1, s + 1)])
    for k in range(1, rings):
        for s in range(sectors):
            a, b = ring_node(k, s), ring_node(k, s + 1)
            c, d = ring_node(k + 1, s), ring_node(k + 1, s + 1)
            if (k + s) % 2 == 0:
                elements += [[a, c, d], [a, d, b]]
            else:
                elements += [[a, c, b], [b, c, d]]

    members = [{"id": s, "endpoints": [ring_node(rings, s), ring_node(rings, s + 1)], "role": "cable",
                "functional_id": 0} for s in range(sectors)]
    members.append({"id": sectors, "endpoints": [0, 1], "role": "strut", "prescribed_length": mast})
    return {
        "version": "tensiform/1",
        "nodes": nodes,
        "functionals": [{"id": 0, "variant": "PowerLength", "params": {"w": 1.0, "p": 4}},
                        {"id": 1, "variant": "PowerArea", "params": {"w": 1.0, "p": 2}}],
        "members": members,
        "elements": [{"id": k, "vertices": v, "functional_id": 1} for k, v in enumerate(elements)],
    }


def main():
    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    for name, model in (("net220", net220()), ("tanzbrunnen", tanzbrunnen())):
        (out / f"{name}.json").write_text(json.dumps(model, indent=1) + "\n")


if __name__ == "__main__":
    main()

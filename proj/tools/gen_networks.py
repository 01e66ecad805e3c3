#!/usr/bin/env python3
"""Writes the network descriptions under data/."""
import json
import pathlib

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"

# expansion t, output channels c, repeats n, first stride s
MOBILENETV2 = [(1, 16, 1, 1), (6, 24, 2, 2), (6, 32, 3, 2), (6, 64, 4, 2),
               (6, 96, 3, 1), (6, 160, 3, 2), (6, 320, 1, 1)]


def layer(name, kind, cin, cout, k=1, stride=1):
    return {"name": name, "kind": kind, "k": k, "stride": stride, "cin": cin, "cout": cout}


def mobilenetv2():
    layers = [layer("conv1", "conv2d", 3, 32, k=3, stride=2)]
    residuals = []
    cin, prev, b = 32, "conv1", 0
    for t, c, n, s in MOBILENETV2:
        for i in range(n):
            stride = s if i == 0 else 1
            hidden = cin * t
            if t != 1:
                layers.append(layer(f"b{b}_exp", "pointwise", cin, hidden))
            layers.append(layer(f"b{b}_dw", "depthwise", hidden, hidden, k=3, stride=stride))
            layers.append(layer(f"b{b}_proj", "pointwise", hidden, c))
            last = f"b{b}_proj"
            if stride == 1 and cin == c:
                layers.append(layer(f"b{b}_add", "residual", c, c))
                residuals.append({"from": prev, "to": f"b{b}_add"})
                last = f"b{b}_add"
            prev, cin, b = last, c, b + 1
    layers.append(layer("conv_last", "pointwise", 320, 1280))
    layers.append(layer("fc", "linear", 1280, 1000))
    return {"name": "mobilenetv2_224", "input": [224, 224, 3], "layers": layers,
            "residuals": residuals}


def bottleneck():
    c, hidden = 120, 240
    layers = [layer("expand", "pointwise", c, hidden),
              layer("depthwise", "depthwise", hidden, hidden, k=3),
              layer("project", "pointwise", hidden, c),
              layer("add", "residual", c, c)]
    return {"name": "bottleneck_16x16_c120_h240", "input": [16, 16, c], "layers": layers,
            "residuals": []}


def single_pw():
    return {"name": "single_pw_256", "input": [32, 32, 256],
            "layers": [layer("pw", "pointwise", 256, 256)], "residuals": []}


if __name__ == "__main__":
    for name, net in [("mobilenetv2_224", mobilenetv2()), ("bottleneck", bottleneck()),
                      ("single_pw", single_pw())]:
        (DATA / f"{name}.json").write_text(json.dumps(net, indent=2) + "\n")

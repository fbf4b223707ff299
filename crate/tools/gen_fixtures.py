"""Regenerate the JSON fixture systems under crates/core/fixtures/."""
import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"


def const(m):
    return {"kind": "constant", "value": m}


def grid(xs, fn):
    return {"kind": "grid", "xs": xs, "values": [fn(x) for x in xs]}


def system(n, p1, h, wb, wc, p0=None):
    sys = {"n": n, "interval": [0, 1], "field": "real", "P1": p1}
    if p0 is not None:
        sys["P0"] = p0
    sys.update({"H": h, "WB": wb, "WC": wc})
    return sys


I2 = [[1, 0], [0, 1]]
SWAP = [[0, 1], [1, 0]]
WB_C = [[-1, 0, 0.5, 0.5], [0, -1, -0.5, -0.5]]
WC_POS = [[0, 0, 1, 0], [0, 0, 0, 1]]
XS = [k / 256 for k in range(257)]


def h_rotated(x):
    c, s = math.cos(2 * x), math.sin(2 * x)
    return [
        [0.5 * (2 + 3 * x - x * c), -0.5 * x * s],
        [-0.5 * x * s, 0.5 * (2 + 3 * x + x * c)],
    ]


FIXTURES = {
    "A": system(1, [[1]], const([[1]]), [[1, 0]], [[0, 1]]),
    "B": system(1, [[1]], const([[1]]), [[1, -1]], [[0, 1]]),
    "C": system(2, I2, const(I2), WB_C, WC_POS),
    "D": system(2, I2, const([[0.5, 0], [0, 1]]), WB_C, WC_POS),
    "E": system(2, SWAP, const(I2), [[3, 1, 0, 0], [0, 0, 1, 0]], [[1, 0, 0, 0], [0, 0, 0, 1]]),
    "F": system(2, I2, const([[2, 0], [0, 2]]), [[1, 0, 0.5, 0.5], [0, 1, 0.5, -0.5]], WC_POS),
    "G": system(
        2,
        I2,
        grid(XS, h_rotated),
        [[1, 0, 0, 0], [0, 1, 0, 0]],
        WC_POS,
        p0=const([[0, 1], [-1, 0]]),
    ),
    "H": system(2, I2, const([[2, 0], [0, 1]]), [[1, 0, 0.5, 0.5], [0, 1, -0.5, -0.5]], WC_POS),
    "I": system(
        2,
        I2,
        const([[0.5, 0], [0, 1]]),
        WB_C,
        [[-0.5, -0.5, -0.5, -0.5], [0.5, -1.5, 0.5, -1.5]],
    ),
    "R": system(
        2,
        SWAP,
        grid([0, 0.5, 1], lambda x: [[1 + x, 0], [0, 1]]),
        [[1, 0, -1, 0], [0, 1, 0, 1]],
        WC_POS,
    ),
}


def render(sys):
    lines = []
    for key, value in sys.items():
        if isinstance(value, dict):
            inner = ", ".join(f'"{k}": {json.dumps(v)}' for k, v in value.items() if k != "values")
            if "values" in value:
                rows = ",\n    ".join(json.dumps(v) for v in value["values"])
                inner += f', "values": [\n    {rows}\n  ]'
            lines.append(f'  "{key}": {{{inner}}}')
        else:
            lines.append(f'  "{key}": {json.dumps(value)}')
    return "{\n" + ",\n".join(lines) + "\n}\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, sys in FIXTURES.items():
        path = OUT / f"fixture{name}.json"
        path.write_text(render(sys))
        print(path)


if __name__ == "__main__":
    main()

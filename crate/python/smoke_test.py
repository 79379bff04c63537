"""Smoke test for the dirflow Python extension.

Build and install first:  pip install --no-build-isolation ./crates/python
"""
from fractions import Fraction

import dirflow_py as d


def main():
    mu = d.Distance(["s", "t", "u"], [[0, 1, 2], [0, 0, 1], [0, 0, 0]])
    report = mu.classify()
    print("interval:", report["interval_representation"])
    print("tree nodes:", len(report["oriented_tree_realization"]["nodes"]))

    net = d.Network(
        ["s", "x", "t", "u"],
        ["s", "t", "u"],
        [("s", "x", 2), ("x", "t", 1), ("t", "u", 1), ("x", "u", 1)],
    )
    for method in ("auto", "lp"):
        r = d.solve(mu, net, method)
        value = Fraction(r["value"]["num"], r["value"]["den"])
        print(f"{method}: value {value} via {r['method']}, certified={r['certified']}")

    net2, mu2 = d.generate(7, nodes=6, terminals=3, weight="tree_realizable", eulerian="properly_inner")
    values = {m: d.solve(mu2, net2, m)["value"] for m in ("lp", "tree")}
    assert values["lp"] == values["tree"], values
    print("generated instance agrees:", values["lp"])
    print("ok")


if __name__ == "__main__":
    main()

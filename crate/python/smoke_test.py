"""Smoke test for the median_lab extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`.
"""

import median_lab as ml


def main():
    q4 = ml.Graph.generate("hypercube", k=4)
    report = q4.check_median()
    assert report["is_median"] and report["triples_checked"] == 560

    c6 = ml.Graph.generate("cycle", n=6)
    assert c6.check_median()["witness"]["triple"] == [0, 2, 4]
    assert ml.Graph.parse(c6.serialize("dot")).edges() == c6.edges()

    line = ml.Graph.generate("quasiline", lam=2, lo=0, hi=40)
    frontier = line.frontier(delta_max=1)
    assert not frontier[0]["feasible"] and frontier[1]["feasible"]
    assert frontier[1]["Delta"] <= 2

    grid = ml.Graph.generate("grid", rows=3, cols=3)
    hp = grid.hyperplanes()
    assert (hp["count"], hp["dimension"]) == (4, 2)

    assert ml.cayley_ball("surface:2", 2)["size"] == 65
    prof = ml.distortion("heisenberg", 12)
    assert prof["points"][0]["length"] == 4
    assert 0.35 <= prof["exponent"] <= 0.65
    assert ml.element_order("T", "r_half") == {"kind": "finite", "value": 2}

    assert ml.euler("r_half", "r_half") == 1
    assert ml.translation_number("euler:T", "r_half")["value"] == "1/2"
    assert ml.check_cocycle("euler:T", samples=1000, seed=1)["pass"]
    assert ml.defect("heisenberg")["defect"] is not None

    g0 = ml.Presentation("GI:I={}")
    g_all = ml.Presentation("GI:I=all")
    assert g0.count_homs("Z2") == 4 and g_all.count_homs("Z2") == 8
    assert ml.separate(g0, g_all, "Z2") == "separated by Z2 (4 vs 8)"
    assert g0.check("GI:{}")["pass"]
    assert len(ml.small_groups(16)) == 42

    try:
        ml.cayley_ball("f2", 10, cap=100)
    except ml.CapExceeded:
        pass
    else:
        raise AssertionError("cap not enforced")
    try:
        ml.Presentation("gens: a; rel: a^")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error not raised")

    print("median_lab smoke test: ok")


if __name__ == "__main__":
    main()

"""Smoke test for the pxlt extension module.

Build and install first:
    pip install maturin
    maturin develop --release -m crates/python/Cargo.toml
"""

import pxlt


def main():
    fe1 = pxlt.Problem.fixture("fe1")
    assert fe1.n == 9
    assert fe1.evaluate("111111111") == fe1.true_value("111111111")

    vig = pxlt.exhaustive_vig(fe1, "nonlinear")
    table = pxlt.Vig.from_cliques(9, [[0, 1, 2, 3], [3, 4, 5, 6], [5, 6, 7, 8]])
    assert vig == table, vig.edges()

    p1, p2 = "111100101", "100111111"
    masks = pxlt.px_masks(vig, p1, p2)
    assert masks == [[1, 2], [4, 5, 7]], masks

    dsm = pxlt.Dsm.fe1_example()
    lt = pxlt.build_lt(dsm)
    assert len(lt) == 17 and not lt.contains([4, 5, 7])
    px_lt = pxlt.build_px_lt(dsm, p1, p2)
    assert all(px_lt.contains(m) for m in masks)
    print("LTopWS masks:", pxlt.ltop_ws(px_lt, 5))

    ring = pxlt.Problem.fixture("dec3-ring")
    assert sorted(pxlt.local_optima(ring)) == sorted(
        ["000000", "111111", "111000", "001110", "100011"]
    )
    endpoints = dict(pxlt.endpoint_distribution(ring))
    ph = endpoints["111000"]
    assert abs(sum(endpoints.values()) - 1.0) < 1e-9
    sizes = [pxlt.hybrid_population_size(ph, 0.99, t) for t in (1, 2, 3)]
    assert sizes == [50, 57, 62], sizes
    print("dec3 ring D(x1,x2) = %.3f" % pxlt.theoretical_dsm(ring).get(0, 1))

    trap = pxlt.Problem.trap_concat(5, 6)
    for variant in pxlt.variants():
        r = pxlt.optimize(trap, variant, budget=200_000, seed=1)
        print("%-16s solved=%s ffe=%s" % (variant, r["solved"], r["solved_at"]))
        assert r["solved"], variant

    noised = trap.with_noise(100.0, seed=3)
    assert noised.noise_level is not None
    print("smoke test passed")


if __name__ == "__main__":
    main()

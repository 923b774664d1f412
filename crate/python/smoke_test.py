"""Smoke test for the `ilw` extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml --release`.
"""

import math

import ilw


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b, tol)


def main():
    L, delta = math.pi, 1.0
    close(ilw.admissible_kmax(L, delta), 0.944085037, 1e-6)
    close(ilw.speed_root_k0(L, delta), 0.795178532, 1e-6)
    close(ilw.wave_speed(L, delta, 1e-6), -(2.0 / math.tanh(2.0) - 1.0), 1e-5)
    close(ilw.symbol(3, math.pi, 50.0), 6.0 - 1.0 / 50.0, 1e-10)

    w = ilw.Wave(L, delta, 0.85)
    print(w)
    assert w.c > 0 and w.shift > 0
    close(w.shift ** 2 + w.c * w.shift, w.a_const, 1e-12)
    u = w.sample(256)
    assert len(u) == 256
    close(sum(u) / len(u), 0.0, 1e-12)
    close(u[0], w.profile(0.0), 1e-12)
    assert w.residual(256) < 1e-8

    s = ilw.spectrum(w)
    assert (s["n_neg"], s["n_zero"]) == (1, 1)
    r = ilw.stability(w)
    assert r["verdict"] == "LinearlyStable" and r["k_ham"] == 0
    close(r["i_direct"], r["i_closed"], 1e-5 * r["i_closed"])
    assert ilw.pf2(w)["pass"]

    e = ilw.evolve(w, t_end=0.5, epsilon=1e-3)
    assert e["sup_rho"] <= 1e-2 and e["drift_e0"] < 1e-8
    assert len(e["t"]) == len(e["rho_w"]) == len(e["mk"])

    try:
        ilw.Wave(L, delta, 0.99)
    except ValueError as err:
        print("rejected k = 0.99:", err)
    else:
        raise AssertionError("k = 0.99 should be rejected")
    print("ok")


if __name__ == "__main__":
    main()

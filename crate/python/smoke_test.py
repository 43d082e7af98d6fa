"""Smoke test for the bergerkit extension module.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import json
import math
from fractions import Fraction

import bergerkit


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL {what}")
    print(f"ok   {what}")


def main():
    leb = bergerkit.catalog("lebesgue")
    sq = bergerkit.square(leb)
    g = [Fraction(x) for x in bergerkit.moments(sq, 10)]
    check(g == [Fraction(1, (n + 1) ** 2) for n in range(11)], "square of dt has moments 1/(n+1)^2")

    half = bergerkit.catalog("pth-lebesgue", "1/2")
    g = [float(x) for x in bergerkit.moments(half, 12)]
    check(all(abs(x - 1 / math.sqrt(n + 1)) < 1e-15 for n, x in enumerate(g)), "q = 1/2 power has moments 1/sqrt(n+1)")
    q = bergerkit.quad_moments(half, 8)
    check(all(abs(x - 1 / math.sqrt(n + 1)) < 1e-10 for n, x in enumerate(q)), "quadrature agrees")

    report = json.loads(bergerkit.verify_square(sq, leb))
    check(report["passed"], "verify_square passes on a computed square")
    check(not json.loads(bergerkit.verify_square(leb, leb))["passed"], "verify_square rejects a non-square")

    two = json.dumps({"atoms": [{"log_pos": "0", "mass": "1/2"}, {"log_pos": "1", "mass": "1/2"}]})
    root, why = bergerkit.sqrt_atomic(two)
    check(root is None and "support mismatch" in why, "two-atomic measure has no root")

    three = json.dumps({"atoms": [
        {"log_pos": "0", "mass": "1/4"}, {"log_pos": "1", "mass": "1/2"}, {"log_pos": "2", "mass": "1/4"},
    ]})
    root, _ = bergerkit.sqrt_atomic(three)
    masses = sorted(Fraction(a["mass"]["rat"]) for a in json.loads(root)["atoms"])
    check(masses == [Fraction(1, 2), Fraction(1, 2)], "three atoms (1/4, 1/2, 1/4) have root (1/2, 1/2)")

    bergman = [str(Fraction(1, n + 1)) for n in range(20)]
    check(bergerkit.is_k_hyponormal(bergman, 3, 8), "Bergman moments are 3-hyponormal")
    check(bergerkit.is_n_contractive(bergman, 5, 8), "Bergman moments are 5-contractive")
    check(not bergerkit.is_k_hyponormal(["1", "1/2", "1", "1/2", "1", "1/2"], 1, 2), "non-monotone moments fail")

    try:
        bergerkit.catalog("nope")
    except ValueError:
        check(True, "unknown catalog name raises ValueError")
    else:
        check(False, "unknown catalog name raises ValueError")


if __name__ == "__main__":
    main()

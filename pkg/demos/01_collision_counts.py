"""How many collisions n equal discs can have: floor, target, and ceilings."""

import sys

from discbilliards import budget, build_1d_max, upper_bounds, verify_scenario

# the n >= 6 ceilings overflow CPython's default 4300-digit str limit
sys.set_int_max_str_digits(0)


def main() -> None:
    print("A line of n discs with a staggered speed schedule realizes every")
    print("pair once, n(n-1)/2 collisions, and the verifier confirms it:")
    for n in range(2, 11):
        result = verify_scenario(build_1d_max(n))
        print(f"  n={n:2d}  proper={result.report.proper_count:3d}  passed={result.passed}")

    print()
    print("The staged two-arm construction targets f(n), which grows like")
    print("n^3/27 and overtakes the pairwise count at n=7:")
    print(f"  {'n':>4} {'n1':>3} {'n2':>4} {'f':>9} {'n(n-1)/2':>9}  verdict    27f/n^3")
    for n in (3, 4, 5, 6, 7, 8, 10, 20, 100):
        b = budget(n)
        if b.f > b.naive:
            verdict = "f ahead "
        elif b.f < b.naive:
            verdict = "f behind"
        else:
            verdict = "tie     "
        ratio = 27 * b.f / n**3
        print(f"  {n:>4} {b.n1:>3} {b.n2:>4} {b.f:>9} {b.naive:>9}  {verdict}   {ratio:.3f}")

    print()
    print("Known ceilings are astronomically far above: the single-exponential")
    print("bound ceil((32 n^1.5)^(n^2)) and the cruder (400 n^2)^(2 n^4).")
    for n in (3, 4, 6, 10):
        lo, hi = upper_bounds(n)
        print(f"  n={n:2d}  first bound: {len(str(lo)):>6} digits   second: {len(str(hi)):>8} digits")
    print()
    print("For n=3 the tight answer is known exactly: three discs collide at")
    print("most 4 times, and demo 02 shows a start that reaches 3 and is not")
    print("reversible into more.")


if __name__ == "__main__":
    main()

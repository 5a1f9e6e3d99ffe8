"""Tour of the convex-set representations and their Minkowski arithmetic.

Builds one set of each variant, walks through sums, scaling, erosion, and
the two distances, and round-trips a set through JSON.  Everything here is
exact in 2-D, so printed residuals should sit at machine precision.
"""

import numpy as np

from setstat.geometry import (
    Ball,
    Box,
    VertexPolytope,
    Zonotope,
    bounds_of,
    hausdorff,
    integrated_distance,
    minkowski_diff,
    minkowski_sum,
    scale,
    set_from_json,
    set_to_json,
    support,
    vertices_of,
)


def main() -> None:
    triangle = VertexPolytope([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
    box = Box([-1.0, -0.5], [1.0, 0.5])
    ball = Ball([0.0, 0.0], 1.0)
    zono = Zonotope([0.0, 0.0], [[1.0, 0.0], [0.5, 1.0]], [1.0, 1.0])

    print("== support functions ==")
    for name, s in [("triangle", triangle), ("box", box), ("ball", ball), ("zonotope", zono)]:
        u = np.array([1.0, 1.0]) / np.sqrt(2.0)
        print(f"h({name}, (1,1)/sqrt 2) = {support(s, u):.6f}")

    print("\n== Minkowski sums ==")
    s = minkowski_sum(triangle, box)
    print(f"triangle + box has {len(vertices_of(s))} vertices")
    lo, hi = bounds_of(minkowski_sum(box, box))
    print(f"box + box bounds: lower {lo}, upper {hi}")
    print(f"ball + ball radius: {minkowski_sum(ball, ball).radius}")

    print("\n== scaling ==")
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])  # quarter turn
    print(f"rotated triangle vertices:\n{vertices_of(scale(rot, triangle))}")
    print(f"-0.5 * box bounds: {bounds_of(scale(-0.5, box))}")

    print("\n== erosion undoes the sum ==")
    recovered = minkowski_diff(s, box)
    print(f"Hausdorff((triangle + box) - box, triangle) = "
          f"{hausdorff(recovered, triangle):.2e}")
    print(f"eroding past the core gives: {minkowski_diff(box, Box([-2, -2], [2, 2]))}")

    print("\n== distances ==")
    shifted = triangle.translate([0.3, -0.1])
    print(f"Hausdorff(triangle, shifted copy)  = {hausdorff(triangle, shifted):.6f}")
    print(f"integrated distance, same pair     = "
          f"{integrated_distance(triangle, shifted):.6f}")
    print(f"Hausdorff(ball, concentric r=2)    = {hausdorff(ball, Ball([0, 0], 2.0)):.6f}")

    print("\n== serialization ==")
    payload = set_to_json(zono)
    back = set_from_json(payload)
    print(f"zonotope JSON round trip gap = {hausdorff(zono, back):.2e}")
    print(f"payload: {payload}")


if __name__ == "__main__":
    main()

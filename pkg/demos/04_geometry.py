"""The metric side: exact tensor, Laplacian, float geodesics and distance.

Run as:  python3 demos/04_geometry.py
"""

import math

import numpy as np

from minkeuclid import (
    GeodesicParams,
    distance,
    geodesic_eval,
    laplace_beltrami,
    metric_matrix,
    path_length,
    volume_density,
)

# The exact metric in the flattened coordinates, with symbolic scales.
g = metric_matrix(1, 1)
print("coordinates:", g.names)
for i in range(g.dim):
    print("  row", i, [str(g.entry(i, j)) for j in range(g.dim)])

print("volume density (1,1):", volume_density(1, 1))

# The Laplace-Beltrami operator assembled from the metric, exactly.
lb = laplace_beltrami(metric_matrix(2, 0))
print("Laplacian (2,0):", lb)

# Geodesics through the base point: Y moves by exponentials in an
# orthogonal frame, V integrates along the way.
rng = np.random.default_rng(4)
frame, _ = np.linalg.qr(rng.normal(size=(2, 2)))
params = GeodesicParams(k=frame, lam=(0.4, -0.3), z=np.array([[0.2, 0.1]]))
for t in (0.0, 0.5, 1.0):
    pt = geodesic_eval(params, t)
    print(f"t={t:3.1f}  y diag {np.diag(pt.y).round(4)}  v {pt.v.round(4)}")

end = geodesic_eval(params, 1.0)
print("path length 0..1:", round(path_length(params), 8))

# Distance between two pure-Y points has a closed form via the zeros of
# the characteristic polynomial det(t Y0 - Y1).
res = distance((np.eye(1), None), (np.array([[math.exp(3.0)]]), None))
print("scalar distance:", round(res.value, 10), " zeros:", res.t)

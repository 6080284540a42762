#!/usr/bin/env python3
"""Generate the tetrahedral test meshes in tests/data.

block: cube of side 8, 6x6x6 hexes split into 6 tets each, interior nodes jittered,
       0-based ids, boundary markers.
tire:  thick cylindrical shell (radii 2..4, height 2), hexes in
       (radius, angle, height) split the same way, 1-based ids, no markers.
"""

import argparse
import pathlib

import numpy as np

# Kuhn split of the unit hex along the (0,0,0)-(1,1,1) diagonal.
KUHN = [
    (0, 1, 3, 7), (0, 1, 5, 7), (0, 2, 3, 7),
    (0, 2, 6, 7), (0, 4, 5, 7), (0, 4, 6, 7),
]


def hex_grid(nx, ny, nz):
    def nid(i, j, k):
        return (k * (ny + 1) + j) * (nx + 1) + i

    tets = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                corners = [nid(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)) for c in range(8)]
                tets.extend([corners[a] for a in t] for t in KUHN)
    ijk = np.array([(i, j, k) for k in range(nz + 1) for j in range(ny + 1) for i in range(nx + 1)], float)
    return ijk, np.array(tets)


def orient(coords, tets):
    p = coords[tets]
    vol = np.einsum("ij,ij->i", np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), p[:, 3] - p[:, 0])
    flip = vol < 0
    tets[flip, 2], tets[flip, 3] = tets[flip, 3].copy(), tets[flip, 2].copy()
    assert np.all(np.abs(vol) > 1e-12)
    return tets


def write(base, coords, tets, boundary, first_id, markers):
    with open(f"{base}.node", "w") as f:
        f.write(f"# {pathlib.Path(base).name}\n")
        f.write(f"{len(coords)} 3 0 {1 if markers else 0}\n")
        for n, p in enumerate(coords):
            line = f"{n + first_id} {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}"
            if markers:
                line += f" {int(boundary[n])}"
            f.write(line + "\n")
    with open(f"{base}.ele", "w") as f:
        f.write(f"{len(tets)} 4 0\n")
        for e, t in enumerate(tets):
            f.write(f"{e + first_id} " + " ".join(str(v + first_id) for v in t) + "\n")


def block(out, rng, n=6, jitter=0.2, side=8.0):
    ijk, tets = hex_grid(n, n, n)
    boundary = np.any((ijk == 0) | (ijk == n), axis=1)
    coords = ijk / n
    coords[~boundary] += rng.uniform(-jitter, jitter, (np.count_nonzero(~boundary), 3)) / n
    coords *= side
    write(out / "block", coords, orient(coords, tets), boundary, 0, True)


def tire(out, rng, nr=3, nt=24, nz=4, jitter=0.15, scale=4.0):
    ijk, tets = hex_grid(nr, nt, nz)
    # Close the ring: angular index nt is the same node as 0.
    seam = ijk[:, 1] == nt
    keep = ~seam
    renumber = -np.ones(len(ijk), int)
    renumber[keep] = np.arange(np.count_nonzero(keep))
    twin = {tuple(p): n for n, p in enumerate(ijk) if p[1] == 0}
    for n in np.flatnonzero(seam):
        p = ijk[n].copy()
        p[1] = 0
        renumber[n] = renumber[twin[tuple(p)]]
    ijk = ijk[keep]
    tets = renumber[tets]
    radial = (ijk[:, 0] == 0) | (ijk[:, 0] == nr) | (ijk[:, 2] == 0) | (ijk[:, 2] == nz)
    free = ~radial
    ijk[free] += rng.uniform(-jitter, jitter, (np.count_nonzero(free), 3))
    rho = 0.5 + 0.5 * ijk[:, 0] / nr
    ang = 2 * np.pi * ijk[:, 1] / nt
    coords = np.column_stack([rho * np.cos(ang), rho * np.sin(ang), 0.5 * ijk[:, 2] / nz])
    coords *= scale
    write(out / "tire", coords, orient(coords, tets), radial, 1, False)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"))
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    block(out, rng)
    tire(out, rng)


if __name__ == "__main__":
    main()

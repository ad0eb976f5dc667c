#!/usr/bin/env python3
"""Regenerates the bundled synthetic inputs under data/.

    python3 tools/make_inputs.py [--out data]

Ligands are random branched trees grown with ~1.5 A bonds and clash
rejection; rotatable bonds are chosen among non-terminal bonds and listed
root to leaf. The grid is a Lennard-Jones/Coulomb field of a synthetic
pocket-shaped receptor. Everything is seeded, so output is reproducible.
"""

import argparse
import math
import os

import numpy as np

# name, atoms, torsions, seed
LIGANDS = [("small", 21, 2, 11), ("medium", 43, 15, 23), ("large", 108, 31, 37)]

HEAVY_TYPES = ["C", "A", "N", "NA", "OA"]
HEAVY_WEIGHTS = [0.55, 0.20, 0.08, 0.06, 0.11]
CHARGE = {"C": 0.05, "A": 0.0, "N": -0.30, "NA": -0.25, "OA": -0.40, "HD": 0.25}
VALENCE = {"C": 4, "A": 3, "N": 3, "NA": 2, "OA": 2, "HD": 1}

# r_eq, eps, solvation, volume (same values as the built-in table)
TYPE_PARAMS = {
    "C": (4.00, 0.150, -0.00143, 33.5103),
    "A": (4.00, 0.150, -0.00052, 33.5103),
    "N": (3.50, 0.160, -0.00162, 22.4493),
    "NA": (3.50, 0.160, -0.00162, 22.4493),
    "OA": (3.20, 0.200, -0.00251, 17.1573),
    "HD": (2.00, 0.020, 0.00051, 0.0),
}

BOND = 1.5


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def grow_ligand(natoms, ntors, seed):
    rng = np.random.default_rng(seed)
    types = ["C"]
    pos = [np.zeros(3)]
    parent = [-1]
    nbrs = [[]]

    def try_place(p):
        for _ in range(400):
            d = random_unit(rng)
            ok = True
            for q in nbrs[p]:
                b = pos[q] - pos[p]
                if np.dot(d, b / np.linalg.norm(b)) > math.cos(math.radians(100)):
                    ok = False
                    break
            if not ok:
                continue
            cand = pos[p] + BOND * d
            if all(np.linalg.norm(cand - pos[k]) >= 2.3 for k in range(len(pos)) if k != p):
                return cand
        return None

    while len(types) < natoms:
        # Hydrogens on polar atoms, otherwise grow the heavy skeleton,
        # preferring recently added atoms so the tree stays chain-like.
        polar = [i for i, t in enumerate(types) if t in ("N", "OA") and len(nbrs[i]) < VALENCE[t]
                 and not any(types[k] == "HD" for k in nbrs[i])]
        if polar and rng.random() < 0.5:
            p = int(rng.choice(polar))
            new_type = "HD"
        else:
            open_heavy = [i for i, t in enumerate(types) if t != "HD" and len(nbrs[i]) < VALENCE[t]]
            w = np.array([1.0 + 0.15 * i for i in open_heavy])
            p = int(rng.choice(open_heavy, p=w / w.sum()))
            new_type = str(rng.choice(HEAVY_TYPES, p=HEAVY_WEIGHTS))
        cand = try_place(p)
        if cand is None:
            continue
        types.append(new_type)
        pos.append(cand)
        parent.append(p)
        nbrs.append([p])
        nbrs[p].append(len(types) - 1)

    n = len(types)
    depth = [0] * n
    for i in range(1, n):
        depth[i] = depth[parent[i]] + 1
    children = [[] for _ in range(n)]
    for i in range(1, n):
        children[parent[i]].append(i)

    def subtree(root):
        out, stack = [], [root]
        while stack:
            k = stack.pop()
            out.append(k)
            stack.extend(children[k])
        return out

    internal = [i for i in range(1, n) if len(nbrs[i]) >= 2 and len(nbrs[parent[i]]) >= 2]
    if len(internal) < ntors:
        raise SystemExit(f"only {len(internal)} internal bonds for {ntors} torsions (seed {seed})")
    chosen = sorted(rng.choice(internal, size=ntors, replace=False).tolist(), key=lambda i: (depth[i], i))
    torsions = []
    for b in chosen:
        moved = sorted(k for k in subtree(b) if k != b)
        torsions.append((parent[b], b, moved))

    # Graph distances for pair selection.
    dist = np.full((n, n), 10**6, dtype=int)
    for s in range(n):
        dist[s, s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for k in frontier:
                for q in nbrs[k]:
                    if dist[s, q] > dist[s, k] + 1:
                        dist[s, q] = dist[s, k] + 1
                        nxt.append(q)
            frontier = nxt

    # Rigid fragment id: atoms connected without crossing a rotatable bond.
    rot_bonds = {(min(a, b), max(a, b)) for a, b, _ in torsions}
    frag = [-1] * n
    f = 0
    for s in range(n):
        if frag[s] >= 0:
            continue
        stack = [s]
        frag[s] = f
        while stack:
            k = stack.pop()
            for q in nbrs[k]:
                if frag[q] < 0 and (min(k, q), max(k, q)) not in rot_bonds:
                    frag[q] = f
                    stack.append(q)
        f += 1

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if dist[i, j] > 3 and frag[i] != frag[j]]

    centre = np.mean(pos, axis=0)
    coords = [p - centre for p in pos]
    charges = [CHARGE[t] + (0.02 * (rng.random() - 0.5) if t in ("C", "A") else 0.0) for t in types]
    return types, charges, coords, torsions, pairs


def fmt(x):
    return repr(float(round(x, 4)))


def write_ligand(path, name, types, charges, coords, torsions, pairs):
    with open(path, "w") as fh:
        fh.write(f"# synthetic {name} ligand: {len(types)} atoms, {len(torsions)} rotatable bonds\n")
        fh.write(f"NATOMS {len(types)}\n")
        for i, (t, q, p) in enumerate(zip(types, charges, coords)):
            fh.write(f"ATOM {i} {t} {fmt(q)} {fmt(p[0])} {fmt(p[1])} {fmt(p[2])}\n")
        fh.write(f"NTORS {len(torsions)}\n")
        for a, b, moved in torsions:
            fh.write(f"TORSION {a} {b} {len(moved)} " + " ".join(map(str, moved)) + "\n")
        fh.write(f"NPAIRS {len(pairs)}\n")
        for i, j in pairs:
            fh.write(f"PAIR {i} {j}\n")


def make_grid(path, dims=32, spacing=0.65, seed=5):
    rng = np.random.default_rng(seed)
    half = 0.5 * (dims - 1) * spacing
    origin = np.array([-half, -half, -half])

    # Receptor: a pocket-lined shell with one side open plus a ridge of
    # atoms that carves a preferred groove off centre.
    rec = []
    while len(rec) < 260:
        d = random_unit(rng)
        if d[2] > 0.55:
            continue
        rec.append(d * rng.uniform(9.0, 12.5))
    for _ in range(30):
        rec.append(np.array([3.0, 0.0, -2.0]) + rng.normal(scale=1.2, size=3))
    rec = np.array(rec)
    rtypes = rng.choice(["C", "N", "OA"], size=len(rec), p=[0.7, 0.15, 0.15])
    rq = np.where(rtypes == "C", 0.0, np.where(rtypes == "N", 0.3, -0.35)) + rng.normal(scale=0.05, size=len(rec))

    ax = origin[0] + spacing * np.arange(dims)
    z, y, x = np.meshgrid(ax, ax, ax, indexing="ij")  # x fastest when flattened
    nodes = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)
    d = np.sqrt(((nodes[:, None, :] - rec[None, :, :]) ** 2).sum(axis=2))
    d = np.maximum(d, 0.5)

    maps = {}
    for t, (r_t, e_t, _, _) in TYPE_PARAMS.items():
        acc = np.zeros(len(nodes))
        for rt in ("C", "N", "OA"):
            r_r, e_r, _, _ = TYPE_PARAMS[rt]
            req = 0.5 * (r_t + r_r)
            eps = math.sqrt(e_t * e_r)
            sel = rtypes == rt
            ratio = req / d[:, sel]
            acc += (eps * (ratio**12 - 2.0 * ratio**6)).sum(axis=1)
        maps[t] = np.minimum(acc, 2.0)
    elec = np.clip((332.06363 * rq[None, :] / (4.0 * d * d)).sum(axis=1), -5.0, 5.0)
    desolv = (0.01 * np.exp(-(d * d) / (2.0 * 3.6 * 3.6))).sum(axis=1)

    with open(path, "w") as fh:
        fh.write("GRID\n")
        fh.write(f"DIM {dims} {dims} {dims}\n")
        fh.write(f"SPACING {spacing}\n")
        fh.write(f"ORIGIN {fmt(origin[0])} {fmt(origin[1])} {fmt(origin[2])}\n")
        fh.write("MAPS " + " ".join(TYPE_PARAMS) + " E D\n")
        for arr in list(maps.values()) + [elec, desolv]:
            fh.write("\n".join(f"{v:.5g}" for v in arr))
            fh.write("\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for name, natoms, ntors, seed in LIGANDS:
        types, charges, coords, torsions, pairs = grow_ligand(natoms, ntors, seed)
        write_ligand(os.path.join(args.out, f"{name}.lig"), name, types, charges, coords, torsions, pairs)
        print(f"{name}: atoms={len(types)} torsions={len(torsions)} pairs={len(pairs)}")
    make_grid(os.path.join(args.out, "box.grd"))


if __name__ == "__main__":
    main()

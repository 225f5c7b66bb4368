#!/usr/bin/env python3
"""Convert a `.mat` graph (sparse `network` adjacency, sparse `group` label
matrix) into the edge-list and label files read by `refine`.

    python3 scripts/convert_mat.py Homo_sapiens.mat data/ppi
    python3 scripts/convert_mat.py POS.mat data/wikipedia
    python3 scripts/convert_mat.py blogcatalog.mat data/blogcatalog

writes `<prefix>.edgelist` (`u v w`, each undirected edge once) and
`<prefix>.labels` (`node label ...`, zero-based ids).
"""

import argparse

import scipy.io
import scipy.sparse as sp


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("mat")
    ap.add_argument("prefix")
    ap.add_argument("--network-key", default="network")
    ap.add_argument("--group-key", default="group")
    args = ap.parse_args()

    mat = scipy.io.loadmat(args.mat)
    a = sp.coo_matrix(mat[args.network_key])
    if a.shape[0] != a.shape[1]:
        raise SystemExit(f"adjacency is not square: {a.shape}")
    a = sp.csr_matrix(a)
    upper = sp.triu(a.maximum(a.T), format="coo")
    with open(f"{args.prefix}.edgelist", "w") as f:
        for u, v, w in zip(upper.row, upper.col, upper.data):
            if w > 0:
                f.write(f"{u} {v} {w:g}\n")

    g = sp.csr_matrix(mat[args.group_key])
    with open(f"{args.prefix}.labels", "w") as f:
        for node in range(g.shape[0]):
            labels = g.indices[g.indptr[node]:g.indptr[node + 1]]
            if len(labels):
                f.write(f"{node} " + " ".join(str(l) for l in sorted(labels)) + "\n")
    print(f"{a.shape[0]} nodes, {upper.nnz} edges, {g.shape[1]} labels")


if __name__ == "__main__":
    main()

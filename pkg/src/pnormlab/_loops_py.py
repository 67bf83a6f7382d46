"""Pure-Python loop-counting kernel (fallback for the compiled ``_loops``)."""
import numpy as np


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def loop_counts(perms, out_u, out_ubar, in_u, in_ubar, node_kind, n_kinds):
    """Count free index classes for every (sigma, tau) gluing.

    For each pair ``(perms[i], perms[j])`` the output-side slot components of
    factor ``k`` of ``U`` are identified with those of factor ``sigma(k)`` of
    ``U-bar`` and the input-side ones with factor ``tau(k)``. ``node_kind``
    holds the register kind of each summation node, or -1 for a node pinned
    to a fixed value. Returns ``counts[i, j, kind]``: the number of classes of
    that kind containing no pinned node.
    """
    perms = np.asarray(perms, dtype=np.int64)
    kinds = [int(k) for k in node_kind]
    out_u = np.asarray(out_u).tolist()
    out_ubar = np.asarray(out_ubar).tolist()
    in_u = np.asarray(in_u).tolist()
    in_ubar = np.asarray(in_ubar).tolist()
    m, n = perms.shape
    n_nodes = len(kinds)
    plist = perms.tolist()
    counts = np.zeros((m, m, n_kinds), dtype=np.int64)
    for i in range(m):
        sigma = plist[i]
        for j in range(m):
            tau = plist[j]
            parent = list(range(n_nodes))
            for k in range(n):
                for a, b in zip(out_u[k], out_ubar[sigma[k]]):
                    ra, rb = _find(parent, a), _find(parent, b)
                    if ra != rb:
                        parent[ra] = rb
                for a, b in zip(in_u[k], in_ubar[tau[k]]):
                    ra, rb = _find(parent, a), _find(parent, b)
                    if ra != rb:
                        parent[ra] = rb
            pinned = set()
            for x in range(n_nodes):
                if kinds[x] < 0:
                    pinned.add(_find(parent, x))
            seen = set()
            for x in range(n_nodes):
                r = _find(parent, x)
                if r in seen or r in pinned:
                    continue
                seen.add(r)
                counts[i, j, kinds[x]] += 1
    return counts

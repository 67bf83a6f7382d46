# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled loop-counting kernel; same contract as ``_loops_py.loop_counts``."""
import numpy as np

cdef Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def loop_counts(perms, out_u, out_ubar, in_u, in_ubar, node_kind, Py_ssize_t n_kinds):
    cdef const long long[:, ::1] P = np.ascontiguousarray(perms, dtype=np.int64)
    cdef const long long[:, ::1] OU = np.ascontiguousarray(out_u, dtype=np.int64)
    cdef const long long[:, ::1] OB = np.ascontiguousarray(out_ubar, dtype=np.int64)
    cdef const long long[:, ::1] IU = np.ascontiguousarray(in_u, dtype=np.int64)
    cdef const long long[:, ::1] IB = np.ascontiguousarray(in_ubar, dtype=np.int64)
    cdef const long long[::1] K = np.ascontiguousarray(node_kind, dtype=np.int64)
    cdef Py_ssize_t m = P.shape[0], n = P.shape[1], n_nodes = K.shape[0]
    cdef Py_ssize_t c_out = OU.shape[1], c_in = IU.shape[1]
    out = np.zeros((m, m, n_kinds), dtype=np.int64)
    cdef long long[:, :, ::1] C = out
    parent_arr = np.empty(n_nodes, dtype=np.intp)
    pinned_arr = np.empty(n_nodes, dtype=np.uint8)
    seen_arr = np.empty(n_nodes, dtype=np.uint8)
    cdef Py_ssize_t[::1] parent = parent_arr
    cdef unsigned char[::1] pinned = pinned_arr
    cdef unsigned char[::1] seen = seen_arr
    cdef Py_ssize_t i, j, k, c, x, ra, rb
    with nogil:
        for i in range(m):
            for j in range(m):
                for x in range(n_nodes):
                    parent[x] = x
                    pinned[x] = 0
                    seen[x] = 0
                for k in range(n):
                    for c in range(c_out):
                        ra = _find(parent, OU[k, c])
                        rb = _find(parent, OB[P[i, k], c])
                        if ra != rb:
                            parent[ra] = rb
                    for c in range(c_in):
                        ra = _find(parent, IU[k, c])
                        rb = _find(parent, IB[P[j, k], c])
                        if ra != rb:
                            parent[ra] = rb
                for x in range(n_nodes):
                    if K[x] < 0:
                        pinned[_find(parent, x)] = 1
                for x in range(n_nodes):
                    ra = _find(parent, x)
                    if seen[ra] or pinned[ra]:
                        continue
                    seen[ra] = 1
                    C[i, j, K[x]] += 1
    return out

"""Pure-Python normal-form kernels.

Reference implementation of the hot loops.  The compiled module
``_kernels`` implements exactly the same pivoting rules and must return
bit-identical results; ``tests/test_backends.py`` checks this.

Matrices are lists of row lists of Python ints.  Every function copies
its input.
"""


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _smallest(A, cells):
    best = None
    best_abs = 0
    for i, j in cells:
        a = A[i][j]
        if a:
            v = a if a > 0 else -a
            if best is None or v < best_abs:
                best = (i, j)
                best_abs = v
    return best


def smith(rows, m, n):
    """Return ``(U, D, V)`` with ``U * A * V == D`` in Smith normal form."""
    A = [list(r) for r in rows]
    U = _identity(m)
    V = _identity(n)
    for t in range(min(m, n)):
        piv = _smallest(A, ((i, j) for i in range(t, m) for j in range(t, n)))
        if piv is None:
            break
        pi, pj = piv
        while True:
            if pi != t:
                A[t], A[pi] = A[pi], A[t]
                U[t], U[pi] = U[pi], U[t]
            if pj != t:
                for row in A:
                    row[t], row[pj] = row[pj], row[t]
                for row in V:
                    row[t], row[pj] = row[pj], row[t]
            p = A[t][t]
            clean = True
            rt = A[t]
            ut = U[t]
            for i in range(t + 1, m):
                a = A[i][t]
                if a:
                    q = a // p
                    if q:
                        ri = A[i]
                        for c in range(t, n):
                            ri[c] -= q * rt[c]
                        ui = U[i]
                        for c in range(m):
                            ui[c] -= q * ut[c]
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                a = A[t][j]
                if a:
                    q = a // p
                    if q:
                        for row in A:
                            row[j] -= q * row[t]
                        for row in V:
                            row[j] -= q * row[t]
                    if A[t][j]:
                        clean = False
            if not clean:
                cells = [(t, j) for j in range(t, n)] + [(i, t) for i in range(t + 1, m)]
                cells.sort()
                pi, pj = _smallest(A, cells)
                continue
            bad = None
            for i in range(t + 1, m):
                ri = A[i]
                for j in range(t + 1, n):
                    if ri[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            rb = A[bad]
            ub = U[bad]
            for c in range(t, n):
                rt[c] += rb[c]
            for c in range(m):
                ut[c] += ub[c]
            pi, pj = t, t
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return U, A, V


def hermite(rows, n):
    """Row-style Hermite normal form; returns only the nonzero rows.

    Pivots are positive and entries above a pivot lie in ``[0, pivot)``,
    so the output is the unique reduced basis of the row lattice.
    """
    H = [list(r) for r in rows if any(r)]
    r = 0
    for col in range(n):
        if r == len(H):
            break
        while True:
            best = None
            best_abs = 0
            for i in range(r, len(H)):
                a = H[i][col]
                if a:
                    v = a if a > 0 else -a
                    if best is None or v < best_abs:
                        best = i
                        best_abs = v
            if best is None:
                break
            if best != r:
                H[r], H[best] = H[best], H[r]
            p = H[r][col]
            hr = H[r]
            done = True
            for i in range(r + 1, len(H)):
                a = H[i][col]
                if a:
                    q = a // p
                    hi = H[i]
                    for c in range(col, n):
                        hi[c] -= q * hr[c]
                    if hi[col]:
                        done = False
            if done:
                break
        if H[r][col] == 0:
            continue
        if H[r][col] < 0:
            H[r] = [-x for x in H[r]]
        hr = H[r]
        p = hr[col]
        for i in range(r):
            a = H[i][col]
            q = a // p
            if q:
                hi = H[i]
                for c in range(col, n):
                    hi[c] -= q * hr[c]
        r += 1
        # drop rows that became zero so the active block stays compact
        H = H[:r] + [h for h in H[r:] if any(h)]
    return [h for h in H[:r]]


def matmul(A, B, m, k, n):
    out = []
    for i in range(m):
        ai = A[i]
        row = [0] * n
        for t in range(k):
            a = ai[t]
            if a:
                bt = B[t]
                for j in range(n):
                    b = bt[j]
                    if b:
                        row[j] += a * b
        out.append(row)
    return out

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled normal-form kernels.

Same pivoting rules as ``_kernels_py``.  Work is done on C ``long long``
buffers with checked arithmetic; on any overflow the call is redone by the
pure-Python kernel on arbitrary-precision ints, so results never depend on
word size.
"""

from libc.stdlib cimport malloc, free

from derivedfunctors import _kernels_py

cdef extern from *:
    bint __builtin_mul_overflow(long long a, long long b, long long *res) nogil
    bint __builtin_sub_overflow(long long a, long long b, long long *res) nogil
    bint __builtin_add_overflow(long long a, long long b, long long *res) nogil

cdef long long LL_MAX = 9223372036854775807LL
cdef long long LIMIT = 4611686018427387904LL  # inputs must stay below 2**62


class _Overflow(Exception):
    pass


cdef inline long long floordiv(long long a, long long p) nogil:
    cdef long long q = a / p
    if (a % p != 0) and ((a < 0) != (p < 0)):
        q -= 1
    return q


cdef inline long long absll(long long a) nogil:
    return -a if a < 0 else a


cdef int axpy(long long *dst, long long *src, long long q, Py_ssize_t n) nogil:
    """dst -= q * src over n entries; returns 1 on overflow."""
    cdef Py_ssize_t c
    cdef long long prod, res
    for c in range(n):
        if src[c] != 0:
            if __builtin_mul_overflow(q, src[c], &prod):
                return 1
            if __builtin_sub_overflow(dst[c], prod, &res):
                return 1
            dst[c] = res
    return 0


cdef int col_axpy(long long *M, Py_ssize_t rows, Py_ssize_t cols,
                  Py_ssize_t dst, Py_ssize_t src, long long q) nogil:
    cdef Py_ssize_t r
    cdef long long prod, res
    for r in range(rows):
        if M[r * cols + src] != 0:
            if __builtin_mul_overflow(q, M[r * cols + src], &prod):
                return 1
            if __builtin_sub_overflow(M[r * cols + dst], prod, &res):
                return 1
            M[r * cols + dst] = res
    return 0


cdef void swap_rows(long long *M, Py_ssize_t cols, Py_ssize_t a, Py_ssize_t b) nogil:
    cdef Py_ssize_t c
    cdef long long tmp
    for c in range(cols):
        tmp = M[a * cols + c]
        M[a * cols + c] = M[b * cols + c]
        M[b * cols + c] = tmp


cdef void swap_cols(long long *M, Py_ssize_t rows, Py_ssize_t cols, Py_ssize_t a, Py_ssize_t b) nogil:
    cdef Py_ssize_t r
    cdef long long tmp
    for r in range(rows):
        tmp = M[r * cols + a]
        M[r * cols + a] = M[r * cols + b]
        M[r * cols + b] = tmp


cdef long long *load(rows, Py_ssize_t m, Py_ssize_t n) except? NULL:
    cdef long long *buf = <long long *> malloc(max(m * n, 1) * sizeof(long long))
    cdef Py_ssize_t i, j
    if buf == NULL:
        raise MemoryError()
    for i in range(m):
        row = rows[i]
        for j in range(n):
            v = row[j]
            if v >= LIMIT or v <= -LIMIT:
                free(buf)
                raise _Overflow()
            buf[i * n + j] = v
    return buf


cdef list dump(long long *buf, Py_ssize_t m, Py_ssize_t n):
    cdef Py_ssize_t i, j
    return [[buf[i * n + j] for j in range(n)] for i in range(m)]


cdef long long *eye(Py_ssize_t n) except? NULL:
    cdef long long *buf = <long long *> malloc(max(n * n, 1) * sizeof(long long))
    cdef Py_ssize_t i
    if buf == NULL:
        raise MemoryError()
    for i in range(n * n):
        buf[i] = 0
    for i in range(n):
        buf[i * n + i] = 1
    return buf


cdef int smith_ll(long long *A, long long *U, long long *V,
                  Py_ssize_t m, Py_ssize_t n) nogil:
    cdef Py_ssize_t t, i, j, c, pi, pj, bad, lim
    cdef long long p, a, q, best_abs, v, res
    cdef bint clean, found
    lim = m if m < n else n
    for t in range(lim):
        found = False
        best_abs = 0
        pi = 0
        pj = 0
        for i in range(t, m):
            for j in range(t, n):
                a = A[i * n + j]
                if a != 0:
                    v = absll(a)
                    if not found or v < best_abs:
                        found = True
                        best_abs = v
                        pi = i
                        pj = j
        if not found:
            break
        while True:
            if pi != t:
                swap_rows(A, n, t, pi)
                swap_rows(U, m, t, pi)
            if pj != t:
                swap_cols(A, m, n, t, pj)
                swap_cols(V, n, n, t, pj)
            p = A[t * n + t]
            clean = True
            for i in range(t + 1, m):
                a = A[i * n + t]
                if a != 0:
                    if a == -LL_MAX - 1 and p == -1:
                        return 1
                    q = floordiv(a, p)
                    if q != 0:
                        if axpy(A + i * n + t, A + t * n + t, q, n - t):
                            return 1
                        if axpy(U + i * m, U + t * m, q, m):
                            return 1
                    if A[i * n + t] != 0:
                        clean = False
            for j in range(t + 1, n):
                a = A[t * n + j]
                if a != 0:
                    if a == -LL_MAX - 1 and p == -1:
                        return 1
                    q = floordiv(a, p)
                    if q != 0:
                        if col_axpy(A, m, n, j, t, q):
                            return 1
                        if col_axpy(V, n, n, j, t, q):
                            return 1
                    if A[t * n + j] != 0:
                        clean = False
            if not clean:
                # lexicographic scan over row t then column t below it
                found = False
                for j in range(t, n):
                    a = A[t * n + j]
                    if a != 0:
                        v = absll(a)
                        if not found or v < best_abs:
                            found = True
                            best_abs = v
                            pi = t
                            pj = j
                for i in range(t + 1, m):
                    a = A[i * n + t]
                    if a != 0:
                        v = absll(a)
                        if not found or v < best_abs:
                            found = True
                            best_abs = v
                            pi = i
                            pj = t
                continue
            bad = -1
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i * n + j] % p != 0:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            for c in range(t, n):
                if __builtin_add_overflow(A[t * n + c], A[bad * n + c], &res):
                    return 1
                A[t * n + c] = res
            for c in range(m):
                if __builtin_add_overflow(U[t * m + c], U[bad * m + c], &res):
                    return 1
                U[t * m + c] = res
            pi = t
            pj = t
        if A[t * n + t] < 0:
            for c in range(n):
                A[t * n + c] = -A[t * n + c]
            for c in range(m):
                U[t * m + c] = -U[t * m + c]
    return 0


def smith(rows, Py_ssize_t m, Py_ssize_t n):
    """Return ``(U, D, V)`` with ``U * A * V == D`` in Smith normal form."""
    cdef long long *A
    cdef long long *U
    cdef long long *V
    cdef int status
    try:
        A = load(rows, m, n)
    except _Overflow:
        return _kernels_py.smith(rows, m, n)
    U = eye(m)
    V = eye(n)
    try:
        with nogil:
            status = smith_ll(A, U, V, m, n)
        if status:
            return _kernels_py.smith(rows, m, n)
        return dump(U, m, m), dump(A, m, n), dump(V, n, n)
    finally:
        free(A)
        free(U)
        free(V)


cdef int hermite_ll(long long *H, Py_ssize_t *order, Py_ssize_t *count, Py_ssize_t n) nogil:
    """In-place HNF on the rows listed in ``order[:count[0]]``.

    ``order`` holds row offsets into ``H``; swapping and dropping rows only
    permutes this index array.  On return ``count[0]`` is the rank.
    """
    cdef Py_ssize_t r = 0, col, i, best, c, k, live
    cdef long long a, v, best_abs, p, q
    cdef long long *hr
    cdef long long *hi
    cdef bint done, nz
    cdef Py_ssize_t tmp
    for col in range(n):
        if r == count[0]:
            break
        while True:
            best = -1
            best_abs = 0
            for i in range(r, count[0]):
                a = H[order[i] * n + col]
                if a != 0:
                    v = absll(a)
                    if best < 0 or v < best_abs:
                        best = i
                        best_abs = v
            if best < 0:
                break
            if best != r:
                tmp = order[r]
                order[r] = order[best]
                order[best] = tmp
            hr = H + order[r] * n
            p = hr[col]
            done = True
            for i in range(r + 1, count[0]):
                hi = H + order[i] * n
                a = hi[col]
                if a != 0:
                    if a == -LL_MAX - 1 and p == -1:
                        return 1
                    q = floordiv(a, p)
                    if axpy(hi + col, hr + col, q, n - col):
                        return 1
                    if hi[col] != 0:
                        done = False
            if done:
                break
        hr = H + order[r] * n
        if hr[col] == 0:
            continue
        if hr[col] < 0:
            for c in range(n):
                hr[c] = -hr[c]
        p = hr[col]
        for i in range(r):
            hi = H + order[i] * n
            q = floordiv(hi[col], p)
            if q != 0:
                if axpy(hi + col, hr + col, q, n - col):
                    return 1
        r += 1
        # stable removal of zero rows below r
        live = r
        for i in range(r, count[0]):
            hi = H + order[i] * n
            nz = False
            for c in range(n):
                if hi[c] != 0:
                    nz = True
                    break
            if nz:
                order[live] = order[i]
                live += 1
        count[0] = live
    count[0] = r
    return 0


def hermite(rows, Py_ssize_t n):
    """Row-style Hermite normal form; returns only the nonzero rows."""
    nonzero = [r for r in rows if any(r)]
    cdef Py_ssize_t m = len(nonzero), i, j
    cdef long long *H
    cdef Py_ssize_t *order
    cdef Py_ssize_t count
    cdef int status
    try:
        H = load(nonzero, m, n)
    except _Overflow:
        return _kernels_py.hermite(rows, n)
    order = <Py_ssize_t *> malloc(max(m, 1) * sizeof(Py_ssize_t))
    if order == NULL:
        free(H)
        raise MemoryError()
    for i in range(m):
        order[i] = i
    count = m
    try:
        with nogil:
            status = hermite_ll(H, order, &count, n)
        if status:
            return _kernels_py.hermite(rows, n)
        return [[H[order[i] * n + j] for j in range(n)] for i in range(count)]
    finally:
        free(H)
        free(order)


def matmul(A, B, Py_ssize_t m, Py_ssize_t k, Py_ssize_t n):
    cdef Py_ssize_t i, t, j
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

"""
exact_linalg.py - Exact integer / rational linear algebra helpers

Features:
- Fraction-free (Bareiss) determinants and ranks over the integers
- Integer normals of lattice hyperplanes via cofactor expansion
- Unimodular column reduction of exponent lattices
- Exact rational solving for cone membership

Nothing in here touches floating point.
"""

from fractions import Fraction
from functools import reduce
from math import gcd, lcm


def vector_gcd(vector):
    return reduce(gcd, (abs(int(x)) for x in vector), 0)


def primitive(vector):
    """Divide an integer vector by the gcd of its entries"""
    g = vector_gcd(vector)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(int(x) // g for x in vector)


def is_primitive(vector):
    return vector_gcd(vector) == 1


def extended_gcd(a, b):
    """(x, y, g) with a*x + b*y = g = gcd(a, b) >= 0"""
    old_r, r = int(a), int(b)
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        return -old_x, -old_y, -old_r
    return old_x, old_y, old_r



def integer_rows(rows):
    """Scale each rational row by its denominator lcm to get integer rows"""
    scaled = []
    for row in rows:
        den = reduce(lcm, (Fraction(x).denominator for x in row), 1)
        scaled.append([int(Fraction(x) * den) for x in row])
    return scaled


def bareiss_det(matrix):
    """Fraction-free determinant of a square integer matrix"""
    size = len(matrix)
    if size == 0:
        return 1
    m = [list(map(int, row)) for row in matrix]
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[size - 1][size - 1]


def rank(rows):
    """Exact rank of a rational matrix given as a list of rows"""
    m = integer_rows(rows)
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    prev = 1
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(r + 1, len(m)):
            for j in range(c + 1, ncols):
                m[i][j] = (m[i][j] * m[r][c] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == len(m):
            break
    return r


def affine_dimension(points):
    """Dimension of the affine hull of a finite point set (-1 when empty)"""
    points = list(points)
    if not points:
        return -1
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    return rank(diffs) if diffs else 0


def cofactor_normal(vectors, dim):
    """Integer normal of the span of dim-1 vectors in Z^dim (generalized cross product)

    Returns the zero vector when the vectors are dependent.
    """
    if dim == 1:
        return (1,)
    normal = []
    for col in range(dim):
        minor = [[v[j] for j in range(dim) if j != col] for v in vectors]
        normal.append((-1) ** col * bareiss_det(minor))
    return tuple(normal)


def column_echelon_transform(rows, ncols):
    """Unimodular C with every row·C supported in the first r columns

    Returns (C, r) where r is the rank of the row lattice. C is a list of
    rows of an ncols x ncols integer matrix with determinant ±1.
    """
    m = [list(map(int, row)) for row in rows]
    c = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def col_axpy(dst, src, q):
        for row in m:
            row[dst] -= q * row[src]
        for row in c:
            row[dst] -= q * row[src]

    def col_swap(a, b):
        for row in m:
            row[a], row[b] = row[b], row[a]
        for row in c:
            row[a], row[b] = row[b], row[a]

    pivot = 0
    for row in m:
        if pivot == ncols:
            break
        for j in range(pivot + 1, ncols):
            while row[j] != 0:
                if row[pivot] == 0:
                    col_swap(pivot, j)
                    continue
                col_axpy(j, pivot, row[j] // row[pivot])
                if row[j] != 0:
                    col_swap(pivot, j)
        if row[pivot] != 0:
            pivot += 1
    return c, pivot


def mat_vec(matrix, vector):
    return tuple(sum(a * b for a, b in zip(row, vector)) for row in matrix)


def vec_mat(vector, matrix):
    """Row vector times matrix"""
    ncols = len(matrix[0]) if matrix else 0
    return tuple(sum(vector[i] * matrix[i][j] for i in range(len(vector))) for j in range(ncols))


def mat_mul(a, b):
    return [list(vec_mat(row, b)) for row in a]


def transpose(matrix):
    return [list(col) for col in zip(*matrix)]


def solve_rational(matrix, rhs):
    """Solve a square system exactly; returns None when singular"""
    size = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((i for i in range(col, size) if aug[i][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(size):
            if i != col and aug[i][col] != 0:
                factor = aug[i][col]
                aug[i] = [a - factor * b for a, b in zip(aug[i], aug[col])]
    return [row[-1] for row in aug]


def rational_det(matrix):
    """Determinant of a square rational matrix"""
    scales = [reduce(lcm, (Fraction(x).denominator for x in row), 1) for row in matrix]
    numerator = bareiss_det(integer_rows(matrix))
    denominator = 1
    for s in scales:
        denominator *= s
    return Fraction(numerator, denominator)

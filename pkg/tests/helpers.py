"""Construction shortcuts shared by the test modules."""

import numpy as np

from cpdkernels import AlgebraDescriptor, AlgebraElement, IndexSet, Kernel


def single_block(matrix) -> AlgebraElement:
    """Element of a one-summand matrix algebra from a plain square array."""
    b = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
    return AlgebraElement(AlgebraDescriptor([b.shape[0]]), [b])


def two_summands(a, b) -> AlgebraElement:
    """Element of a two-summand algebra from two plain square arrays."""
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    b = np.atleast_2d(np.asarray(b, dtype=np.complex128))
    return AlgebraElement(AlgebraDescriptor([a.shape[0], b.shape[0]]), [a, b])


def block_kernel(tables, labels) -> Kernel:
    """Kernel over a one-summand algebra from an n x n nested list of square
    arrays (one array per entry)."""
    values = [[single_block(v) for v in row] for row in tables]
    return Kernel(IndexSet(labels), values[0][0].descriptor, values)

import numpy as np

from wkra.algebra import FiniteAlgebra


def named(A, *names):
    return [A.index(n) for n in names]


def relabel(A, perm):
    """Copy of A with element i renamed to perm[i]."""
    perm = np.asarray(perm)
    inv = np.argsort(perm)
    m = A.m
    leq = np.zeros((m, m), dtype=bool)
    leq[np.ix_(perm, perm)] = A.leq
    comp = perm[A.comp[np.ix_(inv, inv)]]
    neg = perm[A.neg[inv]]
    names = [A.names[i] for i in inv]
    return FiniteAlgebra(leq, comp, neg, int(perm[A.bot]), int(perm[A.top]), int(perm[A.one]),
                         names=names, name=A.name)

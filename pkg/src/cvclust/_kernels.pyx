# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled partition-scoring kernels.

Contracts mirror ``_kernels_py``; see that module for semantics. Each
kernel walks the precomputed neighbor rows once, so a full evaluation is
O(N^2) with a small constant, which is what makes scanning hundreds of
candidate partitions per dataset practical.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def weighted_same_label_lsc(const cnp.int32_t[:, :] nbr_idx,
                            const double[:, :] lsc,
                            const cnp.int32_t[:] labels,
                            const double[:] weights):
    cdef Py_ssize_t n = nbr_idx.shape[0]
    cdef Py_ssize_t ncols = nbr_idx.shape[1]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, p, m
    cdef cnp.int32_t li
    cdef double acc
    for i in range(n):
        li = labels[i]
        acc = 0.0
        m = 0
        for p in range(ncols):
            if labels[nbr_idx[i, p]] == li:
                acc += weights[m] * lsc[i, p]
                m += 1
        out[i] = acc
    return out


def kth_same_label_lsc(const cnp.int32_t[:, :] nbr_idx,
                       const double[:, :] lsc,
                       const cnp.int32_t[:] labels,
                       Py_ssize_t k):
    cdef Py_ssize_t n = nbr_idx.shape[0]
    cdef Py_ssize_t ncols = nbr_idx.shape[1]
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(n, dtype=np.float64)
    cdef Py_ssize_t i, p, m
    cdef cnp.int32_t li
    for i in range(n):
        li = labels[i]
        m = 0
        for p in range(ncols):
            if labels[nbr_idx[i, p]] == li:
                m += 1
                if m == k:
                    out[i] = lsc[i, p]
                    break
    return out


def label_pair_lsc_sums(const cnp.int32_t[:, :] nbr_idx,
                        const double[:, :] lsc,
                        const cnp.int32_t[:] labels,
                        Py_ssize_t n_labels):
    cdef Py_ssize_t n = nbr_idx.shape[0]
    cdef Py_ssize_t ncols = nbr_idx.shape[1]
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(n_labels, dtype=np.float64)
    cdef Py_ssize_t i, p
    cdef cnp.int32_t li
    cdef double acc
    for i in range(n):
        li = labels[i]
        acc = 0.0
        for p in range(ncols):
            if labels[nbr_idx[i, p]] == li:
                acc += lsc[i, p]
        out[li] += acc
    return out

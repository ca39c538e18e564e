"""Independent reference pipeline on numpy arrays, used only as a test oracle.

Deliberately shares no code with the package: blocks are 2-D slices rather
than flat index tuples, and the complement is computed with bitwise NOT.
"""

import numpy as np


def embed_complement(host, wm, depth):
    host = np.asarray(host, dtype=np.int64)
    wm = np.asarray(wm, dtype=np.int64)
    bh, bw = host.shape[0] // wm.shape[0], host.shape[1] // wm.shape[1]
    b = int(host.sum()) % 2
    out = host.copy()
    mask = (1 << depth) - 1
    for i in range(wm.shape[0]):
        for j in range(wm.shape[1]):
            if wm[i, j] != b:
                blk = out[i * bh:(i + 1) * bh, j * bw:(j + 1) * bw]
                blk[...] = ~blk & mask
    return out, b


def embed_parity(host, wm):
    host = np.asarray(host, dtype=np.int64)
    wm = np.asarray(wm, dtype=np.int64)
    bh, bw = host.shape[0] // wm.shape[0], host.shape[1] // wm.shape[1]
    out = host.copy()
    for i in range(wm.shape[0]):
        for j in range(wm.shape[1]):
            blk = out[i * bh:(i + 1) * bh, j * bw:(j + 1) * bw]
            if int(blk.sum()) % 2 != wm[i, j]:
                blk[0, 0] ^= 1
    return out


def attack(target, host, attacker_host, depth):
    target = np.asarray(target, dtype=np.int64)
    if int(np.sum(host)) % 2 == int(np.sum(attacker_host)) % 2:
        return target.copy()
    return ~target & ((1 << depth) - 1)


def extract_informed(marked, reference, b, wm_shape):
    marked, reference = np.asarray(marked), np.asarray(reference)
    bh, bw = marked.shape[0] // wm_shape[0], marked.shape[1] // wm_shape[1]
    out = np.zeros(wm_shape, dtype=np.int64)
    for i in range(wm_shape[0]):
        for j in range(wm_shape[1]):
            sl = np.s_[i * bh:(i + 1) * bh, j * bw:(j + 1) * bw]
            out[i, j] = b ^ int(not np.array_equal(marked[sl], reference[sl]))
    return out


def extract_blind(marked, wm_shape):
    marked = np.asarray(marked)
    bh, bw = marked.shape[0] // wm_shape[0], marked.shape[1] // wm_shape[1]
    return marked.reshape(wm_shape[0], bh, wm_shape[1], bw).sum(axis=(1, 3)) % 2

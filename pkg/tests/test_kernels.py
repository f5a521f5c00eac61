"""Backend agreement: every kernel's numba and numpy variants must match."""

import numpy as np

from flownet import _kernels
from flownet.paths import _csr_lengths
from flownet.spectral import transition_matrix

from conftest import make_slice, random_digraph


def random_slices(count, seed, max_nodes=8):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        names, weights = random_digraph(rng, max_nodes=max_nodes)
        out.append(make_slice(weights, nodes=names))
    return out


class TestBackendSelection:
    def test_active_backend_is_known(self):
        assert _kernels.BACKEND in ("numba", "numpy")

    def test_variants_exported(self):
        assert _kernels.pagerank_numpy is not _kernels.pagerank_numba
        assert _kernels.hits_numpy is not _kernels.hits_numba
        assert _kernels.betweenness_numpy is not _kernels.betweenness_numba


class TestPagerankAgreement:
    def test_variants_match(self):
        for s in random_slices(25, seed=67):
            M = np.ascontiguousarray(transition_matrix(s).T)
            n = M.shape[0]
            r0 = np.full(n, 1.0 / n)
            r_np, it_np, _, conv_np = _kernels.pagerank_numpy(M, r0, 1e-10, 1000)
            r_nb, it_nb, _, conv_nb = _kernels.pagerank_numba(M, r0, 1e-10, 1000)
            assert conv_np and conv_nb
            assert np.abs(r_np - r_nb).max() < 1e-12


class TestHitsAgreement:
    def test_variants_match(self):
        for s in random_slices(25, seed=71):
            W = np.ascontiguousarray(s.matrix)
            h_np, a_np, _, _, conv_np = _kernels.hits_numpy(W, 1e-10, 1000)
            h_nb, a_nb, _, _, conv_nb = _kernels.hits_numba(W, 1e-10, 1000)
            assert conv_np and conv_nb
            assert np.abs(h_np - h_nb).max() < 1e-12
            assert np.abs(a_np - a_nb).max() < 1e-12


class TestBetweennessAgreement:
    def test_variants_match_bitwise(self):
        for s in random_slices(25, seed=73, max_nodes=10):
            n = len(s.node_order)
            indptr, targets, lengths = _csr_lengths(s)
            cb_np = _kernels.betweenness_numpy(indptr, targets, lengths, n)
            cb_nb = _kernels.betweenness_numba(indptr, targets, lengths, n)
            assert (cb_np == cb_nb).all()

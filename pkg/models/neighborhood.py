from dataclasses import dataclass

import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class KHopNeighborhoods:
    """Row v of `matrix` holds the sorted ids u != v with 1 <= dist(v, u) <= k.

    With `ring=True` the rows hold exactly dist(v, u) == k instead.
    """

    k: int
    matrix: sp.csr_matrix
    ring: bool = False

    @property
    def num_nodes(self):
        return self.matrix.shape[0]

    @property
    def sizes(self):
        return self.matrix.indptr[1:] - self.matrix.indptr[:-1]

    def per_node(self, v):
        start, stop = self.matrix.indptr[v], self.matrix.indptr[v + 1]
        return self.matrix.indices[start:stop]

    def __repr__(self):
        kind = 'ring' if self.ring else 'cumulative'
        return f'<KHopNeighborhoods k={self.k} {kind} entries={self.matrix.nnz}>'

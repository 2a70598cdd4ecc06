"""Memory-lean multilevel graph partitioning."""

try:
    from ._leanpart import (  # type: ignore[attr-defined]
        CompressedGraph,
        Graph,
        compress,
        edge_cut,
        graph_from_edges,
        load_csr_binary,
        load_metis,
        max_block_weight,
        partition,
        partition_compressed,
        performance_profile,
    )
except ImportError:  # in-tree builds place the module next to the package
    from _leanpart import (  # type: ignore[no-redef]
        CompressedGraph,
        Graph,
        compress,
        edge_cut,
        graph_from_edges,
        load_csr_binary,
        load_metis,
        max_block_weight,
        partition,
        partition_compressed,
        performance_profile,
    )

__all__ = [
    "CompressedGraph",
    "Graph",
    "compress",
    "edge_cut",
    "graph_from_edges",
    "load_csr_binary",
    "load_metis",
    "max_block_weight",
    "partition",
    "partition_compressed",
    "performance_profile",
]

"""DRESS edge fingerprints, Delta^k vertex-deletion decks, CFI pairs and Weisfeiler-Leman oracles."""
from ._backend import BACKEND
from .cfi import CfiSpec, GadgetVertex, cfi_build, cfi_pair, named_graph
from .delta import (
    DeckFingerprint,
    Mode,
    SweepConfig,
    compare_delta,
    delta_multiset,
    delta_pooled,
    delta_sweep,
    enumerate_subsets,
)
from .dress import ConvergenceReport, EdgeValueMap, dress_fixpoint, dress_step, init_values, vertex_norm
from .fingerprint import (
    Fingerprint,
    SparseHistogram,
    Verdict,
    compare_histograms,
    digest,
    merge,
    quantize,
    sorted_fingerprint,
)
from .graph import (
    Graph,
    are_isomorphic_bruteforce,
    build_graph,
    closed_neighborhood,
    induced_delete,
    parse_graph,
    write_graph,
)
from .wl import WlColoring, WlSignature, wl_distinguish, wl_individualized, wl_refine, wl_signature

__version__ = "0.1.0"

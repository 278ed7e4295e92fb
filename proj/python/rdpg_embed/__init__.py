"""Gradient-based latent-position embeddings for random dot product graphs.

The heavy lifting lives in the compiled `_core` extension; this package
re-exports its public surface.
"""

from ._core import (  # noqa: F401
    ArmijoConfig,
    RdpgError,
    SolveReport,
    Tracker,
    ase,
    ase_directed,
    cost_directed,
    cost_undirected,
    default_step_size,
    dynamic_sbm_step,
    elbow_dimension,
    er_probability,
    grad_directed,
    grad_undirected,
    hollow_mask,
    is_on_manifold,
    least_squares_embedding,
    manifold_violation,
    modified_qr,
    procrustes_distance,
    project_normal,
    project_tangent,
    random_manifold_point,
    rescale_columns,
    retract,
    riemannian_grad,
    sample_rdpg,
    sbm_latent_positions,
    sbm_probability,
    senate_default_pi,
    senate_graph,
    solve_bcd,
    solve_gd,
    solve_riemannian_gd,
    solve_spd,
    top_eigen,
    top_svd,
    tracking_error,
    verify_ambiguity_reduction,
)

__version__ = "0.1.0"

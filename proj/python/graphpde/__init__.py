"""Nonlinear elliptic PDEs on finite weighted directed graphs."""

from graphpde._core import (  # noqa: F401
    UNREACHABLE,
    CounterexampleInstance,
    Graph,
    OperatorSpec,
    SolveReport,
    StencilGrid,
    abs_gradient_consistency,
    active_neighbors,
    classify_ellipticity,
    comparison_check,
    comparison_fuzz,
    counterexample_catalog,
    detect_infeasibility,
    eikonal_minus,
    eikonal_plus,
    evaluate,
    fixed_point_map,
    geometric_grid,
    gradient,
    grid_to_graph,
    harnack_check,
    homogeneity_check,
    inf_laplacian,
    inf_laplacian_ball_consistency,
    lambda1_scheme,
    laplacian,
    lattice_grid,
    one_laplacian,
    propagate_max,
    second_difference_consistency,
    solve,
    solve_eikonal,
)

__version__ = "0.1.0"

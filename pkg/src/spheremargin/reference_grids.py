"""Published verification-accuracy grids used to validate model selection.

These are the large-scale parameter-sweep results behind the three
dynamic-margin configurations (constant-distance/constant-threshold,
dynamic-distance/constant-threshold, dynamic-distance/dynamic-threshold),
each row a hyperparameter setting and each column a verification
benchmark.  They are inputs to the board-count selection rule, whose
chosen rows are expected to be a=0.2, a=0.3, and b=10 respectively.
"""

from __future__ import annotations

from .metrics import AccuracyTable

BENCHMARKS = ("lfw", "agedb30", "calfw", "cplfw", "cfpfp")

# a-sweep at alpha=0.1 for the constant inter-class distance, constant
# threshold configuration (d_inter = pi/2, b = 0).
CID_CT_A_SWEEP = AccuracyTable(
    row_labels=("a=0.1", "a=0.2", "a=0.3", "a=0.4", "a=0.5", "a=0.6"),
    col_labels=BENCHMARKS,
    values=[
        [99.433, 94.867, 93.850, 89.300, 95.057],
        [99.450, 95.033, 93.483, 89.567, 95.214],
        [99.383, 94.517, 93.600, 89.350, 95.243],
        [99.367, 94.950, 93.600, 89.500, 95.071],
        [99.333, 94.650, 93.517, 89.417, 94.943],
        [99.400, 94.317, 93.600, 89.183, 94.929],
    ],
)

# alpha-sweep at a=0.2 for the same configuration.
CID_CT_ALPHA_SWEEP = AccuracyTable(
    row_labels=("alpha=0.06", "alpha=0.08", "alpha=0.10", "alpha=0.12", "alpha=0.14"),
    col_labels=BENCHMARKS,
    values=[
        [99.400, 94.767, 93.800, 89.167, 95.371],
        [99.317, 94.800, 93.633, 89.233, 95.086],
        [99.450, 95.033, 93.483, 89.567, 95.214],
        [99.467, 94.533, 93.650, 89.550, 95.286],
        [99.450, 94.717, 93.850, 89.017, 95.100],
    ],
)

# a-sweep at alpha=0.1 for the measured inter-class distance, constant
# threshold configuration (b = 0).
DID_CT_A_SWEEP = AccuracyTable(
    row_labels=("a=0.1", "a=0.2", "a=0.3", "a=0.4", "a=0.5", "a=0.6"),
    col_labels=BENCHMARKS,
    values=[
        [99.433, 94.550, 93.767, 89.267, 95.200],
        [99.367, 94.600, 93.600, 89.033, 94.943],
        [99.450, 94.850, 93.817, 89.383, 94.857],
        [99.433, 94.383, 93.633, 89.200, 95.143],
        [99.350, 94.583, 93.867, 89.067, 95.114],
        [93.367, 94.950, 93.767, 89.350, 95.286],
    ],
)

# b-sweep at alpha=0.1 for the measured inter-class distance,
# distance-driven threshold configuration (a = 0).
DID_DT_B_SWEEP = AccuracyTable(
    row_labels=("b=10", "b=20", "b=30", "b=40", "b=50", "b=60"),
    col_labels=BENCHMARKS,
    values=[
        [99.450, 94.733, 93.900, 89.200, 95.086],
        [99.367, 94.617, 93.650, 89.117, 94.857],
        [99.433, 94.633, 93.667, 89.367, 95.200],
        [99.400, 94.283, 93.683, 89.600, 95.257],
        [99.433, 94.933, 93.850, 89.450, 94.871],
        [99.317, 94.700, 93.733, 89.617, 95.000],
    ],
)

# Margin-split ablation: rows are (target split, non-target split) of a
# total additive margin of 0.5; boundary equivalence predicts no split
# should dominate.
SPLIT_SWEEP = AccuracyTable(
    row_labels=("0.5/0.0", "0.4/0.1", "0.3/0.2", "0.2/0.3"),
    col_labels=BENCHMARKS,
    values=[
        [99.22, 93.70, 93.13, 88.63, 94.79],
        [99.32, 93.62, 93.02, 88.52, 94.80],
        [99.23, 93.60, 93.23, 88.60, 94.79],
        [99.32, 93.35, 93.18, 88.67, 94.64],
    ],
)

REFERENCE_GRIDS = {
    "cid-ct-a": CID_CT_A_SWEEP,
    "cid-ct-alpha": CID_CT_ALPHA_SWEEP,
    "did-ct-a": DID_CT_A_SWEEP,
    "did-dt-b": DID_DT_B_SWEEP,
    "split": SPLIT_SWEEP,
}

# Selections the board-count rule is required to reproduce.
EXPECTED_SELECTIONS = {
    "cid-ct-a": "a=0.2",
    "did-ct-a": "a=0.3",
    "did-dt-b": "b=10",
}

"""Independence-based MAP structure learning for discrete Markov networks."""

from ibmap.dataset import Dataset, ContingencyTable, load_dataset, subsample, contingency_table
from ibmap.graph import Structure, Triplet, vertex_separated
from ibmap.citests import (
    BayesianTest,
    ChiSquareTest,
    OracleTest,
    Judgment,
    TestCache,
    CachedTest,
)
from ibmap.ibscore import mb_closure, ib_score, ScoreState, flip_rescore
from ibmap.gsmn import gsmn_learn, grow_shrink_blanket, next_query, GSMNRun
from ibmap.hc import ibmap_hc
from ibmap.ts import ibmap_ts
from ibmap.report import RunReport

__all__ = [
    "Dataset",
    "ContingencyTable",
    "load_dataset",
    "subsample",
    "contingency_table",
    "Structure",
    "Triplet",
    "vertex_separated",
    "BayesianTest",
    "ChiSquareTest",
    "OracleTest",
    "Judgment",
    "TestCache",
    "CachedTest",
    "mb_closure",
    "ib_score",
    "ScoreState",
    "flip_rescore",
    "gsmn_learn",
    "grow_shrink_blanket",
    "next_query",
    "GSMNRun",
    "ibmap_hc",
    "ibmap_ts",
    "RunReport",
]

__version__ = "0.1.0"

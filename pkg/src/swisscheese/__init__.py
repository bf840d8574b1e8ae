"""Swiss cheese constructions with exact arithmetic and checkable certificates."""

from .geometry import BoundPair, Disc, QPoint, Q
from .targets import CantorProduct, Segment, SlitChainSet, build_svc, fat_cantor
from .calculus import RationalMap, choose_N, dc_chain_verify, verify_derivative_bound
from .cheese import SwissCheese, build_cheese, certify
from .slits import build_chain, classify, figure_block, system_from_rule
from .measures import FeasibilityProblem, control_disc_algebra, cheese_evidence

__version__ = "0.1.0"

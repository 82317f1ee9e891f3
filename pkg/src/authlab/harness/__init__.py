"""Adversary harness: simulated worlds, attacks and the attribute matrix."""

from . import attacks
from .matrix import ROWS, MatrixConfig, MatrixResult, attack_matrix, replay_window_sweep
from .report import AdversaryState, AttackReport, Outcome, load_dictionary, make_dictionary
from .worlds import JiangWorld, ProposedWorld, jiang_world, proposed_world

"""Difference-of-submodular minimization and discriminative tree classifiers."""

from .errors import GroundSetTooLarge, NumericalError, SubsupError, ValidationError
from .infomodel import (DiscreteClassModel, GaussianClassModel, conditional_mi, ear_score, entropy_oracle,
                        mi_edge_weights, split_mi_oracle)
from .kernels import BACKEND
from .polymatroid import ModularWeights, Permutation, greedy_vertex, in_base_polytope, modular_approximation
from .setcore import GroundSet, SetFunctionOracle, TableOracle, check_property
from .sfm import brute_force_minimize, min_norm_minimize, minimize_proper, queyranne_minimize
from .ssp import SspOptions, local_search_certify, ssp_minimize
from .structlearn import (TreeStructure, chow_liu_tree, evaluate_error, fit_tree_classifier,
                          make_discriminative_tree, random_tree)

__version__ = "0.1.0"

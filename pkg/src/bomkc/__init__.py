"""Budget online multiple kernel classification with sparse passive-aggressive learners."""
from .classifier import CombinedClassifier, KernelClassifier, hinge, sign
from .data import Dataset, Instance, ParseError, SparseVector, UnsupportedTaskError, load_libsvm, parse_libsvm
from .harness import RunConfig, repeat_and_average, run_experiment, sweep
from .kernels import KernelSpec, default_pool, eval_kernel
from .learners import BudgetViolation, SpaParams, spa_step
from .multi import HedgeState, MultiKernelLearner
from .prng import RngStream

__version__ = "0.1.0"

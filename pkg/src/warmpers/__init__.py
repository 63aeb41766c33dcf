"""warmpers: persistent homology with warm-start factorization updates."""

from .errors import (DegenerateGradientError, InputError, RankDeficiencyError,
                     StructuralError, UsageError)
from .field import GF2, FieldElement, PrimeField, field_add, field_inv, field_mul
from .filtration import (ENCLOSING, Cell, FilteredComplex, FiltrationDiff,
                         diff_filtrations, enclosing_radius, lower_star_cubical,
                         lower_star_freudenthal, rips_filtration)
from .persistence import (Barcode, DecompositionSet, PersistencePair,
                          compute_persistence, format_barcode, loss_gradient_rips,
                          persistence_loss, update_persistence)
from .reduction import (OperationCounters, RUDecomposition, apply_clearing,
                        make_upper_triangular, reduce, reduce_complex, reduce_rowwise)
from .sparsemat import (ColumnMatrix, Permutation, SparseColumn, axpy, dump_triples,
                        kendall_tau, matmul, normalized_kendall_tau, pivot,
                        row_times_matrix)
from .update import (MatrixDiff, general_update, general_update_cohomology,
                     update_permutation)

__version__ = "0.1.0"

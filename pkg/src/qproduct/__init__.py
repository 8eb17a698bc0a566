"""Decide whether multipartite density matrices are tensor products.

The test is the rank of the realigned density matrix: a state is a product
across a bipartition iff that rank is one. On top of the bipartite test the
package offers semiproduct, fully-product and k-product tests, factor
extraction, and a search for the finest product partition.
"""

from .errors import (
    ContractError,
    DegenerateFactorError,
    DimensionError,
    InconsistencyError,
    NotProduct,
    NumericalError,
    ParseError,
    PartitionError,
    QProductError,
    ValidationError,
)
from .matcore import (
    DEFAULT_REL_TOL,
    SchmidtOperatorDecomposition,
    SvdResult,
    frobenius_norm,
    hermitian_error,
    kron,
    numerical_rank,
    psd_min_eigenvalue,
    realign,
    schmidt_operator_decomposition,
    svd,
    unvec,
    vec,
)
from .partitions import (
    Partition,
    coarse_grain_dims,
    enumerate_bipartitions,
    format_partition,
    one_vs_rest_partitions,
    parse_partition,
)
from .product import (
    FactorizationTree,
    MultipartiteReport,
    ProductReport,
    bipartite_view,
    factorize_bipartition,
    finest_product_partition,
    is_fully_product,
    is_k_product,
    is_product_bipartition,
    is_semiproduct,
    reconstruct,
)
from .states import (
    DensityMatrix,
    PureState,
    density_from_pure,
    gen_bell,
    gen_example1,
    gen_example2,
    gen_ghz,
    gen_random_density,
    gen_random_product,
    gen_w,
    partial_trace,
    permute_subsystems,
    tensor,
)

__version__ = "0.1.0"

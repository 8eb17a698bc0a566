"""Exception hierarchy shared by all qproduct modules."""


class QProductError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(QProductError, ValueError):
    """Matrix or vector shapes do not match the requested split."""


class NumericalError(QProductError, ArithmeticError):
    """Non-finite input or a failed numerical routine."""


class ContractError(QProductError, ValueError):
    """A function precondition was violated (e.g. unsorted input)."""


class ValidationError(QProductError, ValueError):
    """A matrix or vector is not a valid quantum state."""


class PartitionError(QProductError, ValueError):
    """A partition or index set is inconsistent with the subsystems."""


class ParseError(PartitionError):
    """Malformed partition text.

    Attributes
    ----------
    position : int
        Zero-based character offset into the (whitespace-stripped) text
        at which the problem was detected.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DegenerateFactorError(NumericalError):
    """A rank-one split produced a factor with (numerically) zero trace."""


class InconsistencyError(NumericalError):
    """Two routes to the same verdict disagreed at the same tolerance."""


class NotProduct(QProductError):
    """The state is not a product across the requested split.

    The full :class:`~qproduct.product.ProductReport` is available as
    ``report`` so callers can inspect the singular values.
    """

    def __init__(self, report):
        super().__init__(
            f"not a product across {report.partition_tested} "
            f"(rank {report.rank}, ratio {report.ratio:.3e})"
        )
        self.report = report

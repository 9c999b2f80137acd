"""
Domain errors for the cube KSBA toolkit

Every error knows how to render itself for the HTTP layer (status_code)
and for the command line (exit_code).
"""
from typing import Optional


class CubeKsbaError(Exception):
    """Base class for toolkit errors"""

    status_code = 422
    exit_code = 1

    def __init__(self, message: str, payload: Optional[dict] = None):
        super().__init__(message)
        self.message = message
        self.payload = payload or {}

    def to_dict(self):
        rv = dict(self.payload)
        rv["error"] = type(self).__name__
        rv["message"] = self.message
        rv["status_code"] = self.status_code
        return rv


class InvalidInput(CubeKsbaError):
    """Malformed document or bound"""

    status_code = 400


class DimensionMismatch(CubeKsbaError):
    """Rows of a linear system have inconsistent lengths"""


class NotSymmetric(CubeKsbaError):
    """Gram matrix is not symmetric"""


class DegenerateCell(CubeKsbaError):
    """Vertex set does not span three dimensions"""


class InvalidSubdivision(CubeKsbaError):
    """Cells do not form a polyhedral subdivision of the cube"""


class NotRegular(CubeKsbaError):
    """Subdivision admits no height function"""


class NotABulletCell(CubeKsbaError):
    """Cell signature is none of the four corner-cut-free types"""


class InvalidCoefficients(CubeKsbaError):
    """Coefficient zeros violate the apex rules"""


class LatticeMismatch(CubeKsbaError):
    """Classes live on different Picard lattices"""


class UnknownLattice(CubeKsbaError):
    """No hard-coded ample cone for this lattice"""


class UnboundedSlice(CubeKsbaError):
    """Root set on the slice is infinite without a window"""

    exit_code = 2


class WindowTooSmall(CubeKsbaError):
    """Window cannot hold a translate of every candidate subdiagram"""

    exit_code = 2


class EvenZeroStratumNotFound(CubeKsbaError):
    """No zero-dimensional even-cusp stratum in the atlas"""


class BoundExceeded(CubeKsbaError):
    """A search hit its configured bound or a check stayed inconclusive"""

    exit_code = 2

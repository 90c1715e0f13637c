"""Second-order principal symbols, connections and volume structures on R^d."""
from dataclasses import dataclass

from app.exceptions import DimensionError, ExcludedParameterError
from app.models.polynomial import MultiPoly


@dataclass(frozen=True)
class PrincipalSymbolHat:
    """
    Block symbol (S^{ik}, B^i, C) of a second-order operator on the extended space.

    The operator's top part is S^{ik} d_i d_k + 2 B^i d_i w + C w^2.
    """

    dim: int
    S: tuple[tuple[MultiPoly, ...], ...]
    B: tuple[MultiPoly, ...]
    C: MultiPoly

    def __post_init__(self):
        d = self.dim
        if len(self.S) != d or any(len(row) != d for row in self.S):
            raise DimensionError(f"S must be a {d}x{d} matrix")
        if len(self.B) != d:
            raise DimensionError(f"B must have {d} components")
        for poly in (*[p for row in self.S for p in row], *self.B, self.C):
            if poly.dim != d:
                raise DimensionError("symbol entry of the wrong dimension")
        for i in range(d):
            for k in range(i + 1, d):
                if self.S[i][k] != self.S[k][i]:
                    raise DimensionError(f"S is not symmetric at ({i + 1}, {k + 1})")

    @classmethod
    def build(cls, S, B=None, C=None) -> "PrincipalSymbolHat":
        S = tuple(tuple(row) for row in S)
        dim = len(S)
        B = tuple(B) if B is not None else tuple(MultiPoly.zero(dim) for _ in range(dim))
        C = C if C is not None else MultiPoly.zero(dim)
        return cls(dim, S, B, C)


@dataclass(frozen=True)
class Connection:
    """Components Gamma_i of a connection on the density bundle."""

    dim: int
    gamma: tuple[MultiPoly, ...]

    def __post_init__(self):
        if len(self.gamma) != self.dim or any(g.dim != self.dim for g in self.gamma):
            raise DimensionError(f"connection needs {self.dim} components of dimension {self.dim}")

    @classmethod
    def of(cls, gamma) -> "Connection":
        gamma = tuple(gamma)
        return cls(gamma[0].dim, gamma)

    @classmethod
    def trivial(cls, dim: int) -> "Connection":
        return cls(dim, tuple(MultiPoly.zero(dim) for _ in range(dim)))


@dataclass(frozen=True)
class VolumeStructure:
    """
    A volume form rho|Dx| recorded through Gamma_i = -d_i log rho.

    Only the flat connection is stored; Gamma must be curl-free.
    """

    dim: int
    gamma: tuple[MultiPoly, ...]

    def __post_init__(self):
        if len(self.gamma) != self.dim or any(g.dim != self.dim for g in self.gamma):
            raise DimensionError(f"volume structure needs {self.dim} components of dimension {self.dim}")
        for i in range(1, self.dim + 1):
            for j in range(i + 1, self.dim + 1):
                if self.gamma[j - 1].partial(i) != self.gamma[i - 1].partial(j):
                    raise ExcludedParameterError(
                        f"Gamma is not curl-free: d{i} Gamma_{j} != d{j} Gamma_{i}"
                    )

    @classmethod
    def of(cls, gamma) -> "VolumeStructure":
        gamma = tuple(gamma)
        return cls(gamma[0].dim, gamma)

    @classmethod
    def lebesgue(cls, dim: int) -> "VolumeStructure":
        return cls(dim, tuple(MultiPoly.zero(dim) for _ in range(dim)))

    @classmethod
    def from_potential(cls, phi: MultiPoly) -> "VolumeStructure":
        """rho = exp(-phi), so Gamma = grad phi."""
        return cls(phi.dim, tuple(phi.partial(i) for i in range(1, phi.dim + 1)))

    def as_connection(self) -> Connection:
        return Connection(self.dim, self.gamma)

from typing import List, Optional

from app.exceptions import DimensionError
from app.models.geometry import VolumeStructure
from app.schemas.base import BaseSchema, Dimension
from app.services.parser import parse_polynomial


class VolumeSchema(BaseSchema):
    """Volume form rho|Dx| given by Gamma_i = -d_i log rho, or by a potential phi with rho = exp(-phi)."""

    dim: Dimension
    gamma: Optional[List[str]] = None
    potential: Optional[str] = None

    def to_model(self) -> VolumeStructure:
        if self.potential is not None:
            if self.gamma is not None:
                raise DimensionError("give either gamma or potential, not both")
            return VolumeStructure.from_potential(parse_polynomial(self.potential, self.dim))
        if self.gamma is None:
            return VolumeStructure.lebesgue(self.dim)
        if len(self.gamma) != self.dim:
            raise DimensionError(f"gamma needs {self.dim} components, got {len(self.gamma)}")
        return VolumeStructure(self.dim, tuple(parse_polynomial(g, self.dim) for g in self.gamma))

    @classmethod
    def from_model(cls, vol: VolumeStructure) -> "VolumeSchema":
        return cls(dim=vol.dim, gamma=[str(g) for g in vol.gamma])


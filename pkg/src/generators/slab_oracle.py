"""
Slab Oracle

Normal-incidence transmission through stacks of lossy dielectric layers in
air, by cascading per-layer two-port (ABCD) matrices. Incoherent stacks
cascade power transfer matrices instead and carry no phase.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import epsilon_0, mu_0, speed_of_light

from ..data_structures.measurements import BandPlan, MaterialCategory, PenetrationLossSeries
from ..utils.errors import ConfigError

logger = logging.getLogger(__name__)

ETA_0 = math.sqrt(mu_0 / epsilon_0)


@dataclass(frozen=True)
class Layer:
    """Homogeneous lossy dielectric: eps_c = eps_r * (1 - j*tan_delta)."""
    rel_permittivity: float
    loss_tangent: float = 0.0
    thickness: float = 0.01  # m

    def __post_init__(self):
        if self.rel_permittivity < 1:
            raise ConfigError(f"relative permittivity must be >= 1, got {self.rel_permittivity}")
        if self.loss_tangent < 0:
            raise ConfigError(f"loss tangent must be >= 0, got {self.loss_tangent}")
        if self.thickness < 0:
            raise ConfigError(f"layer thickness must be >= 0 m, got {self.thickness}")

    @property
    def complex_permittivity(self) -> complex:
        return self.rel_permittivity * (1 - 1j * self.loss_tangent)

    @property
    def refractive_index(self) -> complex:
        # principal root: negative imaginary part for a passive medium
        return np.sqrt(self.complex_permittivity)

    def with_thickness(self, thickness: float) -> "Layer":
        return Layer(self.rel_permittivity, self.loss_tangent, thickness)

    def to_dict(self) -> dict:
        return {
            "rel_permittivity": self.rel_permittivity,
            "loss_tangent": self.loss_tangent,
            "thickness_m": self.thickness,
        }


@dataclass(frozen=True)
class SlabStack:
    """Ordered layers with air on both sides."""
    layers: tuple[Layer, ...] = field(default_factory=tuple)
    coherent: bool = True

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ConfigError("slab stack needs at least one layer")

    @property
    def total_thickness(self) -> float:
        return sum(layer.thickness for layer in self.layers)

    def reversed(self) -> "SlabStack":
        return SlabStack(tuple(reversed(self.layers)), self.coherent)

    def to_dict(self) -> dict:
        return {"layers": [layer.to_dict() for layer in self.layers], "coherent": self.coherent}


# Fixture conveniences, not measured values
MATERIAL_PRESETS: dict[MaterialCategory, Layer] = {
    MaterialCategory.WOOD: Layer(2.0, 0.05),
    MaterialCategory.GLASS: Layer(6.0, 0.02),
    MaterialCategory.CONCRETE: Layer(5.3, 0.15),
    MaterialCategory.FOAM: Layer(1.1, 0.002),
}


def preset_layer(category: MaterialCategory, thickness_m: float) -> Layer:
    try:
        return MATERIAL_PRESETS[category].with_thickness(thickness_m)
    except KeyError:
        raise ConfigError(f"no dielectric preset for category {category.value!r}")


def double_glazing(
    pane_thickness_m: float = 0.004,
    gap_m: float = 0.010,
    pane: Layer = MATERIAL_PRESETS[MaterialCategory.GLASS],
) -> SlabStack:
    """Glass - air gap - glass."""
    glass = pane.with_thickness(pane_thickness_m)
    return SlabStack((glass, Layer(1.0, 0.0, gap_m), glass))


def _abcd(stack: SlabStack, frequency_hz: float) -> np.ndarray:
    k0 = 2 * math.pi * frequency_hz / speed_of_light
    total = np.eye(2, dtype=complex)
    for layer in stack.layers:
        n = layer.refractive_index
        gamma_d = 1j * k0 * n * layer.thickness
        eta = ETA_0 / n
        cosh, sinh = np.cosh(gamma_d), np.sinh(gamma_d)
        total = total @ np.array([[cosh, eta * sinh], [sinh / eta, cosh]])
    return total


def _coherent_coefficients(stack: SlabStack, frequency_hz: float) -> tuple[complex, complex]:
    (a, b), (c, d) = _abcd(stack, frequency_hz)
    denominator = a + b / ETA_0 + c * ETA_0 + d
    t = 2 / denominator
    r = (a + b / ETA_0 - c * ETA_0 - d) / denominator
    return complex(r), complex(t)


def _interface_power(n1: complex, n2: complex) -> tuple[float, float]:
    reflectance = abs((n1 - n2) / (n1 + n2)) ** 2
    return reflectance, 1 - reflectance


def _incoherent_coefficients(stack: SlabStack, frequency_hz: float) -> tuple[float, float]:
    """Power reflectance and transmittance with internal reflections added in power."""
    k0 = 2 * math.pi * frequency_hz / speed_of_light
    indices = [1.0 + 0j] + [layer.refractive_index for layer in stack.layers] + [1.0 + 0j]
    total = np.eye(2)
    for i in range(len(indices) - 1):
        r, t = _interface_power(indices[i], indices[i + 1])
        # symmetric interface at normal incidence: R12 = R21, T12 = T21
        total = total @ (np.array([[1, -r], [r, t * t - r * r]]) / t)
        if i < len(stack.layers):
            layer = stack.layers[i]
            attenuation = math.exp(2 * k0 * layer.refractive_index.imag * layer.thickness)
            total = total @ np.array([[1 / attenuation, 0], [0, attenuation]])
    transmittance = 1 / total[0, 0]
    reflectance = total[1, 0] / total[0, 0]
    return float(reflectance), float(transmittance)


def transmission(stack: SlabStack, frequency_hz: float) -> complex:
    """Complex transmission coefficient t of the stack at ``frequency_hz``.

    Incoherent stacks return sqrt(T) with zero phase.
    """
    if frequency_hz <= 0:
        raise ValueError(f"frequency must be positive, got {frequency_hz}")
    if stack.coherent:
        return _coherent_coefficients(stack, frequency_hz)[1]
    return complex(math.sqrt(_incoherent_coefficients(stack, frequency_hz)[1]))


def reflection(stack: SlabStack, frequency_hz: float) -> complex:
    """Complex reflection coefficient (sqrt(R) for incoherent stacks)."""
    if frequency_hz <= 0:
        raise ValueError(f"frequency must be positive, got {frequency_hz}")
    if stack.coherent:
        return _coherent_coefficients(stack, frequency_hz)[0]
    return complex(math.sqrt(_incoherent_coefficients(stack, frequency_hz)[0]))


def insertion_transmission(stack: SlabStack, frequency_hz: float) -> complex:
    """Transmission relative to the same thickness of air, as LOS/NLOS subtraction sees it."""
    t = transmission(stack, frequency_hz)
    if not stack.coherent:
        return t
    k0 = 2 * math.pi * frequency_hz / speed_of_light
    return t * np.exp(1j * k0 * stack.total_thickness)


def material_loss_db(stack: SlabStack, frequency_hz: float) -> float:
    """-20*log10|t|."""
    magnitude = abs(transmission(stack, frequency_hz))
    return -20 * math.log10(magnitude) if magnitude > 0 else math.inf


def loss_spectrum(stack: SlabStack, plan: BandPlan, name: str = "slab") -> PenetrationLossSeries:
    """Material loss at each plan center."""
    losses = [material_loss_db(stack, c * 1e9) for c in plan.center_frequencies]
    return PenetrationLossSeries.from_arrays(name, plan.centers, losses)

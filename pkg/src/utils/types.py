"""Shared type aliases for configuration, error context and numerical arrays."""

from collections.abc import Callable, Mapping, Sequence

import numpy as np
import numpy.typing as npt

ConfigValue = str | int | float | bool | None | list[float] | list[int] | list[str] | dict[str, float]
ConfigMapping = Mapping[str, ConfigValue]
MutableConfigMapping = dict[str, ConfigValue]

ErrorContextValue = str | int | float | bool | None
ErrorContext = Mapping[str, ErrorContextValue]
MutableErrorContext = dict[str, ErrorContextValue]

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]

# A point on a product of spheres: each block is an (n, d) array whose rows lie on S^{d-1}(r).
Blocks = Sequence[FloatArray]
LogDensityAndGrad = Callable[[Blocks], tuple[float, list[FloatArray]]]
EuclideanLogDensityAndGrad = Callable[[FloatArray], tuple[float, FloatArray]]

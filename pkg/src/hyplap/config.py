from dataclasses import dataclass

DEFAULT_BASIS_CAP = 10**6
DEFAULT_MAX_DIM = 3


@dataclass(frozen=True)
class Tolerances:
    # tol_fun: absolute entrywise slack for commuting squares.
    # tol_rank: singular values / eigenvalues below tol_rank * max(1, top) are zero.
    # tol_spec: relative slack when comparing spectra.
    tol_fun: float = 1e-9
    tol_rank: float = 1e-9
    tol_spec: float = 1e-8

    def __post_init__(self):
        for name in ("tol_fun", "tol_rank", "tol_spec"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_TOLERANCES = Tolerances()

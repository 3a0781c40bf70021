"""Exception hierarchy shared by every defectkit module."""


class DefectKitError(Exception):
    """Base class for all structured errors raised by defectkit."""


# core geometry
class DegenerateLattice(DefectKitError, ValueError):
    pass


class InvalidTransform(DefectKitError, ValueError):
    pass


class InvalidSite(DefectKitError, IndexError):
    pass


class SiteCollision(DefectKitError, ValueError):
    pass


# parsers
class ParseError(DefectKitError, ValueError):
    """Malformed field in a text format.

    ``line`` and ``column`` are 1-based; ``column`` points at the start of the
    offending token (0 when the whole line is missing).
    """

    def __init__(self, message, line=0, column=0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class CountMismatch(DefectKitError, ValueError):
    pass


class FormatError(DefectKitError, ValueError):
    pass


class TruncatedFile(FormatError):
    pass


class NormalizationError(FormatError):
    def __init__(self, spin, kpoint, band, norm):
        self.spin = spin
        self.kpoint = kpoint
        self.band = band
        self.norm = norm
        super().__init__(
            f"state (spin={spin}, k={kpoint}, band={band}) has norm {norm!r}, expected 1"
        )


class SchemaError(DefectKitError, ValueError):
    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path or '<root>'}: {message}")


class MissingArtifact(DefectKitError, FileNotFoundError):
    def __init__(self, path):
        self.path = str(path)
        super().__init__(f"referenced file not found: {self.path}")


# thermodynamics
class RangeError(DefectKitError, ValueError):
    pass


class MissingChemicalPotential(DefectKitError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DegenerateTransition(DefectKitError, ValueError):
    pass


class EmptyInput(DefectKitError, ValueError):
    pass


# electrostatics
class ConvergenceError(DefectKitError, ArithmeticError):
    def __init__(self, eta, achieved):
        self.eta = eta
        self.achieved = achieved
        super().__init__(
            f"Ewald sum not converged (eta={eta:.6g} 1/A, last change {achieved:.3e} eV)"
        )


# optics
class DegenerateEnergies(DefectKitError, ZeroDivisionError):
    pass


class InvalidBand(DefectKitError, IndexError):
    pass


class WeightError(DefectKitError, ValueError):
    pass


class InfiniteLifetime(DefectKitError, ArithmeticError):
    """Raised instead of returning a number when the dipole moment vanishes."""


# spin
class MissingGrid(DefectKitError, ValueError):
    pass


class NoUnpairedSpin(DefectKitError, ValueError):
    pass


class SpinTooLow(DefectKitError, ValueError):
    pass


class GridMismatch(DefectKitError, ValueError):
    pass


class InvalidTensor(DefectKitError, ValueError):
    pass


# screening
class IncompleteDossier(DefectKitError, ValueError):
    pass

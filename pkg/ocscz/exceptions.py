""" Exception hierarchy raised throughout ocscz. """

__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"


class OcsczError(Exception):
    """ Base class of every error raised by this package. """


class ParameterDomainError(OcsczError, ValueError):
    """ A parameter lies outside the domain the model is defined on. """


class ConvergenceError(OcsczError):
    pass


class NumericalDifferentiationError(OcsczError):
    pass


class NetworkError(OcsczError):
    """ Capacitance network is not positive definite or is ill-conditioned. """


class InfeasibleBiasError(OcsczError):
    """ No gate charge gives the requested parity splitting. """

    def __init__(self, message, max_split=None):
        super().__init__(message)
        self.max_split = max_split


class DegenerateLadderError(OcsczError):
    pass


class IntegrationError(OcsczError):
    pass


class LeakageError(OcsczError):
    """ Residual coupler excitation too large for the phases to be defined. """

    def __init__(self, message, populations=None):
        super().__init__(message)
        self.populations = populations


class SynthesisError(OcsczError):
    """ Pulse optimizer did not reach the residual tolerance. """

    def __init__(self, message, residuals=None, params=None):
        super().__init__(message)
        self.residuals = residuals
        self.params = params


class PhaseInfeasibleError(OcsczError):
    pass


class UnitError(OcsczError):
    pass


class FormulaDomainError(OcsczError):
    pass


class UnsupportedAnalyticError(OcsczError):
    """ Closed form requested for a noise exponent it does not cover. """


class ConfigError(OcsczError):
    """ Bad configuration file; the message names the line or the key. """

    def __init__(self, message, lineno=None, key=None):
        super().__init__(message)
        self.lineno = lineno
        self.key = key

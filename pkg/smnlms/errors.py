class Error(Exception):
    '''Base class for every error raised by the library.'''


class DimensionError(Error, ValueError):
    pass


class SpecError(Error, ValueError):
    '''Invalid configuration or signal specification.'''


class NonFiniteError(Error, ArithmeticError):
    pass


class ContextMismatch(Error):
    '''Reference sample inconsistent with the recorded system and noise.'''


class RecordsError(Error):
    pass


class StepError(Error):
    def __init__(self, k: int, cause: Error) -> None:
        super().__init__(f'iteration {k}: {cause}')
        self.k, self.cause = k, cause

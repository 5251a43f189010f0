"""Exception hierarchy. Every domain failure derives from LatdecError (CLI exit code 1)."""


class LatdecError(Exception):
    pass


class CatalogError(LatdecError):
    pass


class DecompositionError(LatdecError):
    pass


class CapacityError(LatdecError):
    pass


class CertificationInconclusive(LatdecError):
    pass


class SynthesisRefused(LatdecError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class RegistryError(LatdecError):
    pass


class TrainingError(LatdecError):
    def __init__(self, msg, checkpoint=None):
        super().__init__(msg)
        self.checkpoint = checkpoint

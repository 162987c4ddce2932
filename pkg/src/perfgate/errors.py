"""Exception types shared across the package.

Every domain error derives from PerfGateError so the CLI and the HTTP
layer can map "your data is bad" (exit 3 / HTTP 422) separately from
programming errors.
"""


class PerfGateError(Exception):
    """Base class for all domain errors."""


class MalformedRow(PerfGateError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class DuplicateInput(PerfGateError):
    def __init__(self, input_id: str):
        self.input_id = input_id
        super().__init__(f"duplicate input_id {input_id!r}")


class EmptyDataset(PerfGateError):
    pass


class InvalidSpec(PerfGateError):
    pass


class UnknownInput(PerfGateError):
    def __init__(self, input_id: str):
        self.input_id = input_id
        super().__init__(f"unknown input_id {input_id!r}")


class TooFewRecords(PerfGateError):
    pass


class ConstantAttribute(PerfGateError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"attribute {name!r} is constant")


class NoClusters(PerfGateError):
    pass


class EmptyCluster(PerfGateError):
    pass


class NonPositiveStatements(PerfGateError):
    pass


class ClusterMismatch(PerfGateError):
    pass


class UnknownCommit(PerfGateError):
    def __init__(self, commit_id: str):
        self.commit_id = commit_id
        super().__init__(f"unknown commit {commit_id!r}")


class UnknownModel(PerfGateError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown model {name!r}")

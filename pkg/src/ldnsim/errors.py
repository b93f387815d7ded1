"""Exception types shared across the simulator."""


class LdnsimError(Exception):
    """Base class for all simulator errors."""


class InvalidParameter(LdnsimError):
    pass


class DisconnectedAfterFailure(LdnsimError):
    pass


class Unreachable(LdnsimError):
    pass


class InfeasibleMatching(LdnsimError):
    pass


class InvalidParticipants(LdnsimError):
    pass


class NoViablePath(LdnsimError):
    pass


class EmptySamples(LdnsimError):
    pass


class ConfigError(LdnsimError):
    pass

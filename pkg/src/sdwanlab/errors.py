"""Domain error hierarchy.

Every error raised by the library derives from SdwanLabError so the gateway
can map failures to exactly one HTTP status / CLI exit class
(see docs/error-mapping.md).
"""


class SdwanLabError(Exception):
    """Base class for all domain errors."""


# --- input / document errors -------------------------------------------------

class SchemaError(SdwanLabError):
    """Document does not conform to the published schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class ValidationError(SdwanLabError):
    """Document is well-formed but semantically invalid."""


class CompileError(SdwanLabError):
    """Template compilation failed (unbound variable, type mismatch)."""


# --- simulation errors -------------------------------------------------------

class SchedulingInPast(SdwanLabError):
    """Event scheduled before the current simulation time."""


class UnknownEndpoint(SdwanLabError):
    """Ping endpoint does not name a known, addressable node."""


class UnknownDevice(SdwanLabError):
    """Device id not present in the simulation."""


# --- routing errors ----------------------------------------------------------

class DisconnectedArea(SdwanLabError):
    """Area graph is not connected among its routers."""

    def __init__(self, area: str, unreachable: list):
        self.area = area
        self.unreachable = list(unreachable)
        super().__init__(f"area {area!r}: unreachable routers {self.unreachable}")


class NonConvergence(SdwanLabError):
    """Distance-vector iteration exceeded the round bound (indicates a bug)."""


# --- controller / onboarding errors ------------------------------------------

class Unreachable(SdwanLabError):
    """No working underlay path between controller and device."""


class ControllerNotReady(SdwanLabError):
    """Operation requires a controller that has not finished onboarding."""


class SerialNotAllowed(SdwanLabError):
    """Serial is not on the uploaded allowlist."""


class DeviceNotSynced(SdwanLabError):
    """Template push targets a device that is not synced/managed."""


class PushFailed(SdwanLabError):
    """Config application failed; device rolled back to its previous config."""


class PermissionDenied(SdwanLabError):
    """Write command rejected on a template-managed (read-only) device."""


class UnknownCommand(SdwanLabError):
    """Command is not in the published device command set."""

"""Exception types raised for bad scenario configuration."""


class ConfigError(ValueError):
    """Base class for every user-facing configuration problem."""


class ScenarioSyntaxError(ConfigError):
    """The scenario document is not valid JSON or has the wrong shape."""


class UnknownKeyError(ConfigError):
    def __init__(self, key: str, where: str = "scenario"):
        super().__init__(f"unknown key {key!r} in {where}")
        self.key = key


class ValueRangeError(ConfigError):
    def __init__(self, key: str, value, requirement: str):
        super().__init__(f"{key}={value!r} is invalid: {requirement}")
        self.key = key
        self.value = value
        self.requirement = requirement


class OverlapError(ConfigError):
    """Two initial vehicles overlap or are out of platoon order."""

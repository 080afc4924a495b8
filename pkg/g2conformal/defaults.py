import os
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator

from g2conformal.constants import (
    DEFAULT_DEGREE,
    DEFAULT_OUTPUT_FORMAT,
    DEFAULT_SAMPLE_POINTS,
    DIMENSION,
    ENV_PREFIX,
    OUTPUT_FORMATS,
)

Point = tuple[Fraction, ...]


class RunConfig(BaseModel):
    """
    Settings of one command-line run. Values not given on the command line
    come from G2CONFORMAL_* environment variables, then the defaults here.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    command: str
    metric_path: Path | None = None
    form_path: Path | None = None
    field_path: Path | None = None
    samples: list[Point] = Field(default_factory=lambda: list(DEFAULT_SAMPLE_POINTS))
    degree: int = Field(default=DEFAULT_DEGREE, ge=0)
    output_format: str = DEFAULT_OUTPUT_FORMAT
    skip_homology: bool = False
    flat_basis: bool = False
    ode: str | None = None
    log_level: str = "WARNING"

    @field_validator("samples", mode="before")
    @classmethod
    def _coerce_samples(cls, value):
        points = []
        for point in value:
            point = tuple(Fraction(coordinate) for coordinate in point)
            if len(point) != DIMENSION:
                raise ValueError(f"a sample point has {DIMENSION} coordinates, got {len(point)}")
            points.append(point)
        if not points:
            raise ValueError("at least one sample point is needed")
        return points

    @field_validator("output_format")
    @classmethod
    def _check_format(cls, value: str) -> str:
        if value not in OUTPUT_FORMATS:
            raise ValueError(f"output format must be one of {OUTPUT_FORMATS}, got '{value}'")
        return value

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level '{value}'")
        return value


def environment_defaults(environ: dict[str, str] | None = None) -> dict:
    """RunConfig fields found in the environment (after .env has been loaded)."""
    environ = os.environ if environ is None else environ
    found = {}
    if f"{ENV_PREFIX}FORMAT" in environ:
        found["output_format"] = environ[f"{ENV_PREFIX}FORMAT"]
    if f"{ENV_PREFIX}DEGREE" in environ:
        found["degree"] = environ[f"{ENV_PREFIX}DEGREE"]
    if f"{ENV_PREFIX}LOG_LEVEL" in environ:
        found["log_level"] = environ[f"{ENV_PREFIX}LOG_LEVEL"]
    if f"{ENV_PREFIX}SAMPLES" in environ:
        found["samples_path"] = environ[f"{ENV_PREFIX}SAMPLES"]
    return found


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class SuiteReport(BaseModel):
    """Ordered checks plus ordered key/value results of one command."""

    title: str
    checks: list[CheckResult] = Field(default_factory=list)
    values: list[tuple[str, str]] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add_check(self, name: str, passed: bool, detail: str = "") -> CheckResult:
        check = CheckResult(name=name, passed=bool(passed), detail=detail)
        self.checks.append(check)
        return check

    def add_value(self, key: str, value: object) -> None:
        rendered = value.render() if hasattr(value, "render") else str(value)
        self.values.append((key, rendered))

    def extend(self, other: "SuiteReport", prefix: str = "") -> None:
        for check in other.checks:
            self.checks.append(check.model_copy(update={"name": prefix + check.name}))
        self.values.extend((prefix + key, value) for key, value in other.values)

    def render(self, output_format: str = DEFAULT_OUTPUT_FORMAT) -> str:
        if output_format == "structured":
            lines = [f"suite = {self.title}"]
            lines += [f"check.{check.name} = {'pass' if check.passed else 'fail'}" for check in self.checks]
            lines += [f"value.{key} = {value}" for key, value in self.values]
            lines.append(f"result = {'pass' if self.passed else 'fail'}")
            return "\n".join(lines) + "\n"

        lines = [self.title, "=" * len(self.title)]
        for check in self.checks:
            status = "PASS" if check.passed else "FAIL"
            lines.append(f"[{status}] {check.name}" + (f": {check.detail}" if check.detail else ""))
        if self.values:
            lines.append("")
            width = max(len(key) for key, _ in self.values)
            lines += [f"{key.ljust(width)}  {value}" for key, value in self.values]
        lines.append("")
        lines.append("all checks passed" if self.passed else "some checks failed")
        return "\n".join(lines) + "\n"

"""
Line-oriented text format for metrics, tensors, tractor sections and
sample points.

    # comment
    metric
      1 4 = 1
      2 5 = 1
      3 3 = -1
    end
    form sigma 2 weight 3
      1 2 = x3
    end
    tensor T dd
      1 1 = x1^2
    end
    tractor 2
      form rho 2 weight 1
      ...
    end

Indices are 1-based. Metric entries are listed for i <= j; form entries
for increasing index tuples (the rest follow by antisymmetry); tensor
entries are listed in full. Missing entries are zero. A samples file has
one point per line, five rationals separated by spaces or commas.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

from g2conformal.constants import DIMENSION, SLOT_NAMES
from g2conformal.exceptions import ArityError, DegenerateMetricError, ExpressionSyntaxError, InputFormatError
from g2conformal.geometry.metric import MetricField
from g2conformal.geometry.tensor import COVARIANT, CONTRAVARIANT, TensorField
from g2conformal.geometry.tractor import TractorSection, form_components, form_from_components, slot_degrees
from g2conformal.scalars.parser import parse_expr
from g2conformal.scalars.ratfn import RatFn

logger = logging.getLogger(__name__)


class TensorDocument:
    """Everything read from one file: an optional metric, named tensors and forms, tractor sections."""

    def __init__(self, *, source: str = "<string>") -> None:
        self.source = source
        self.metric: MetricField | None = None
        self.tensors: dict[str, TensorField] = {}
        self.tractors: list[TractorSection] = []

    def tensor(self, name: str | None = None) -> TensorField:
        if name is None:
            if len(self.tensors) != 1:
                raise InputFormatError(f"{self.source}: expected exactly one tensor, found {len(self.tensors)}")
            return next(iter(self.tensors.values()))
        try:
            return self.tensors[name]
        except KeyError:
            raise InputFormatError(f"{self.source}: no tensor named '{name}'") from None

    def tractor(self) -> TractorSection:
        if len(self.tractors) != 1:
            raise InputFormatError(f"{self.source}: expected exactly one tractor block, found {len(self.tractors)}")
        return self.tractors[0]


class _Lines:
    def __init__(self, text: str, source: str) -> None:
        self.source = source
        self._lines = [
            (number, line.split("#", 1)[0].strip())
            for number, line in enumerate(text.splitlines(), start=1)
        ]
        self._position = 0

    def error(self, number: int, message: str) -> InputFormatError:
        return InputFormatError(f"{self.source}:{number}: {message}")

    def __iter__(self) -> Iterator[tuple[int, str]]:
        return self

    def __next__(self) -> tuple[int, str]:
        while self._position < len(self._lines):
            number, line = self._lines[self._position]
            self._position += 1
            if line:
                return number, line
        raise StopIteration

    def last_line(self) -> int:
        return self._lines[-1][0] if self._lines else 0


def _parse_entry(lines: _Lines, number: int, line: str, arity: int) -> tuple[tuple[int, ...], RatFn]:
    if "=" not in line:
        raise lines.error(number, f"expected '<indices> = <expression>', got '{line}'")
    left, right = line.split("=", 1)
    try:
        index = tuple(int(token) - 1 for token in left.split())
    except ValueError:
        raise lines.error(number, f"indices must be integers, got '{left.strip()}'") from None
    if len(index) != arity:
        raise lines.error(number, f"expected {arity} indices, got {len(index)}")
    if any(not 0 <= i < DIMENSION for i in index):
        raise lines.error(number, f"indices must lie in 1..{DIMENSION}")
    try:
        value = parse_expr(right.strip())
    except ExpressionSyntaxError as error:
        raise lines.error(number, str(error)) from error
    return index, value


def _read_entries(lines: _Lines, arity: int, header: int) -> Iterator[tuple[int, tuple[int, ...], RatFn]]:
    for number, line in lines:
        if line == "end":
            return
        index, value = _parse_entry(lines, number, line, arity)
        yield number, index, value
    raise lines.error(header, "block is not closed by 'end'")


def _parse_weight(lines: _Lines, number: int, tokens: Sequence[str]) -> int:
    if not tokens:
        return 0
    if len(tokens) != 2 or tokens[0] != "weight":
        raise lines.error(number, f"expected 'weight <int>', got '{' '.join(tokens)}'")
    try:
        return int(tokens[1])
    except ValueError:
        raise lines.error(number, f"weight must be an integer, got '{tokens[1]}'") from None


def _read_metric(lines: _Lines, header: int) -> MetricField:
    entries = {}
    for number, (i, j), value in _read_entries(lines, 2, header):
        if i > j:
            raise lines.error(number, "metric entries are listed with i <= j")
        entries[(i, j)] = value
    try:
        return MetricField.from_upper_entries(entries)
    except DegenerateMetricError as error:
        raise lines.error(header, str(error)) from error


def _read_form(lines: _Lines, header: int, tokens: Sequence[str]) -> tuple[str, TensorField]:
    if len(tokens) < 2:
        raise lines.error(header, "expected 'form <name> <degree> [weight <w>]'")
    name = tokens[0]
    try:
        degree = int(tokens[1])
    except ValueError:
        raise lines.error(header, f"form degree must be an integer, got '{tokens[1]}'") from None
    weight = _parse_weight(lines, header, tokens[2:])
    components = {}
    for number, index, value in _read_entries(lines, degree, header):
        if list(index) != sorted(set(index)):
            raise lines.error(number, "form entries are listed on strictly increasing indices")
        components[index] = value
    return name, form_from_components(degree, components, weight)


def _read_tensor(lines: _Lines, header: int, tokens: Sequence[str]) -> tuple[str, TensorField]:
    if len(tokens) < 2:
        raise lines.error(header, "expected 'tensor <name> <variance> [weight <w>]'")
    name, variance = tokens[0], tokens[1]
    if variance == "-":
        variance = ""
    if set(variance) - {COVARIANT, CONTRAVARIANT}:
        raise lines.error(header, f"variance may only contain 'u' and 'd', got '{variance}'")
    weight = _parse_weight(lines, header, tokens[2:])
    entries = {index: value for _, index, value in _read_entries(lines, len(variance), header)}
    return name, TensorField.from_entries(variance, entries, weight)


def _read_tractor(lines: _Lines, header: int, tokens: Sequence[str]) -> TractorSection:
    if len(tokens) != 1 or tokens[0] not in ("0", "1", "2"):
        raise lines.error(header, "expected 'tractor <k>' with k in 0..2")
    k = int(tokens[0])
    degrees = slot_degrees(k)
    slots: dict[str, TensorField] = {}
    for number, line in lines:
        if line == "end":
            break
        keyword, *rest = line.split()
        if keyword != "form":
            raise lines.error(number, f"tractor blocks contain form blocks, got '{keyword}'")
        name, form = _read_form(lines, number, rest)
        if name not in degrees or (k == 0 and name == "mu"):
            raise lines.error(number, f"'{name}' is not a slot of a k={k} section")
        if form.rank != degrees[name]:
            raise lines.error(number, f"slot '{name}' has degree {degrees[name]}, got {form.rank}")
        slots[name] = form
    else:
        raise lines.error(header, "block is not closed by 'end'")
    zero = TractorSection.zero(k).slots()
    for name, default in zero.items():
        slots.setdefault(name, default)
    try:
        return TractorSection(k=k, **slots)
    except ArityError as error:
        raise lines.error(header, str(error)) from error


def parse_document(text: str, source: str = "<string>") -> TensorDocument:
    lines = _Lines(text, source)
    document = TensorDocument(source=source)
    for number, line in lines:
        keyword, *tokens = line.split()
        if keyword == "metric":
            if tokens:
                raise lines.error(number, "'metric' takes no arguments")
            if document.metric is not None:
                raise lines.error(number, "a second metric block")
            document.metric = _read_metric(lines, number)
        elif keyword == "form":
            name, form = _read_form(lines, number, tokens)
            document.tensors[name] = form
        elif keyword == "tensor":
            name, tensor = _read_tensor(lines, number, tokens)
            document.tensors[name] = tensor
        elif keyword == "tractor":
            document.tractors.append(_read_tractor(lines, number, tokens))
        else:
            raise lines.error(number, f"unknown block '{keyword}'")
    logger.debug(
        "parsed %s: metric=%s tensors=%s tractors=%d",
        source,
        document.metric is not None,
        sorted(document.tensors),
        len(document.tractors),
    )
    return document


def load_document(path: str | Path) -> TensorDocument:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as error:
        raise InputFormatError(f"{path}: {error.strerror}") from error
    return parse_document(text, str(path))


def load_metric(path: str | Path) -> MetricField:
    document = load_document(path)
    if document.metric is None:
        raise InputFormatError(f"{path}: no metric block")
    return document.metric


def load_form(path: str | Path, name: str | None = None) -> TensorField:
    return load_document(path).tensor(name)


def load_tractor(path: str | Path) -> TractorSection:
    return load_document(path).tractor()


def parse_samples(text: str, source: str = "<string>") -> list[tuple[Fraction, ...]]:
    points = []
    for number, line in _Lines(text, source):
        tokens = line.replace(",", " ").split()
        if len(tokens) != DIMENSION:
            raise InputFormatError(f"{source}:{number}: a sample point has {DIMENSION} coordinates, got {len(tokens)}")
        try:
            points.append(tuple(Fraction(token) for token in tokens))
        except (ValueError, ZeroDivisionError):
            raise InputFormatError(f"{source}:{number}: coordinates must be rationals") from None
    if not points:
        raise InputFormatError(f"{source}: no sample points")
    return points


def load_samples(path: str | Path) -> list[tuple[Fraction, ...]]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as error:
        raise InputFormatError(f"{path}: {error.strerror}") from error
    return parse_samples(text, str(path))


# --- writers --------------------------------------------------------------


def _entry_line(index: Sequence[int], value: RatFn, indent: str) -> str:
    return f"{indent}{' '.join(str(i + 1) for i in index)} = {value.render()}"


def render_metric(metric: MetricField) -> str:
    lines = ["metric"]
    for i in range(DIMENSION):
        for j in range(i, DIMENSION):
            value = metric.g[i, j]
            if value:
                lines.append(_entry_line((i, j), value, "  "))
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_form(name: str, form: TensorField, indent: str = "") -> str:
    header = f"{indent}form {name} {form.rank}"
    if form.weight:
        header += f" weight {form.weight}"
    lines = [header]
    for index, value in sorted(form_components(form).items()):
        lines.append(_entry_line(index, value, indent + "  "))
    lines.append(f"{indent}end")
    return "\n".join(lines) + "\n"


def render_tensor(name: str, tensor: TensorField) -> str:
    header = f"tensor {name} {tensor.variance or '-'}"
    if tensor.weight:
        header += f" weight {tensor.weight}"
    lines = [header]
    lines.extend(_entry_line(index, value, "  ") for index, value in tensor.nonzero_items())
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_tractor(section: TractorSection) -> str:
    if section.passive:
        raise ArityError("Only sections without passive indices are written")
    slots = section.slots()
    body = "".join(render_form(name, slots[name], "  ") for name in SLOT_NAMES if name in slots)
    return f"tractor {section.k}\n{body}end\n"


def render_samples(points: Sequence[Sequence[Fraction]]) -> str:
    return "".join(" ".join(str(Fraction(value)) for value in point) + "\n" for point in points)

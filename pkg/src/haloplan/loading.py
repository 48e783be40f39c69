"""Read programs and input values from files.

A program file is a JSON document::

    {
        "objects": [
            {"name": "x", "N": 12, "distribution": {"kind": "block", "P": 4}},
            {"name": "y", "N": 12, "distribution": {"kind": "block", "P": 4}}
        ],
        "kernels": [
            {
                "name": "heat", "input": "x", "output": "y",
                "signature": {"kind": "stencil", "offsets": [-1, 0, 1]},
                "combiner": {"kind": "weighted", "weights": {"-1": -1, "0": 2, "1": -1}}
            }
        ]
    }

Distributions:

- ``{"kind": "block" | "cyclic" | "replicated", "P": int}``
- ``{"kind": "halo", "P": int, "width": int}``
- ``{"kind": "explicit", "sets": [[[lo, hi], ...], ...]}``, one list of half-open intervals per
  processor. An optional ``"P"`` must be the number of these lists.

An optional ``"N"`` in a distribution must be the size of its object.

Signatures, each with an optional ``"n_in"`` defaulting to the size of the kernel input:

- ``{"kind": "stencil", "offsets": [int, ...]}``
- ``{"kind": "affine", "stride": int, "offsets": [int, ...]}``
- ``{"kind": "sparse", "rows": {"i": row, ...}}`` where a row is a list of indices or a list of
  ``[lo, hi]`` intervals, or ``{"kind": "sparse", "matrix": [[0, 1, ...], ...]}``, a row-major
  matrix of zeros and ones
- ``{"kind": "total"}``

Combiners, optional, default to a sum:

- ``{"kind": "sum"}``, ``{"kind": "max"}``
- ``{"kind": "weighted", "weights": {"offset": value, ...}}``, values being integers or strings
  like ``"1/2"``

Every problem is reported with a ``ProgramFileError`` telling where it is: the line and column
for a JSON syntax error, else the path of the faulty field, like ``kernels[0].signature.offsets``.

A values file holds whitespace separated integers or rationals like ``-3/4``.

"""

import json
import logging
from typing import Any, Callable, Dict, List, Mapping, Optional

from .combiners import Combiner, MaxCombiner, SumCombiner, WeightedCombiner
from .datatypes import Value, parse_value
from .distribution import (
    Distribution,
    block_distribution,
    cyclic_distribution,
    explicit_distribution,
    halo_distribution,
    replicated_distribution,
)
from .exceptions import DomainError, HaloPlanException, ProgramError, ProgramFileError
from .indexset import IndexSet
from .program import Program
from .signature import (
    AffineSignature,
    SignatureFunction,
    SparseSignature,
    StencilSignature,
    TotalSignature,
)


__all__ = [
    "load_program",
    "parse_program",
    "program_to_document",
    "load_values",
    "parse_values",
]


logger = logging.getLogger(__name__)


def _get(data: Mapping[str, Any], key: str, field: str) -> Any:
    if key not in data:
        raise ProgramFileError(f"`{key}` is required", field=field)
    return data[key]


def _as_mapping(value: Any, field: str) -> Mapping[str, Any]:
    if not isinstance(value, dict):
        raise ProgramFileError("must be an object", field=field)
    return value


def _as_list(value: Any, field: str) -> List[Any]:
    if not isinstance(value, list):
        raise ProgramFileError("must be a list", field=field)
    return value


def _as_str(value: Any, field: str) -> str:
    if not isinstance(value, str) or not value:
        raise ProgramFileError("must be a non-empty string", field=field)
    return value


def _as_int(value: Any, field: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProgramFileError("must be an integer", field=field)
    if minimum is not None and value < minimum:
        raise ProgramFileError(f"must be at least {minimum} (got {value})", field=field)
    return value


def _as_int_list(value: Any, field: str) -> List[int]:
    return [
        _as_int(item, f"{field}[{position}]")
        for position, item in enumerate(_as_list(value, field))
    ]


def _as_index_set(value: Any, field: str) -> IndexSet:
    """Read a list of ``[lo, hi]`` intervals."""
    intervals = []
    for position, item in enumerate(_as_list(value, field)):
        pair = _as_int_list(item, f"{field}[{position}]")
        if len(pair) != 2:
            raise ProgramFileError(
                "an interval must be a `[lo, hi]` pair", field=f"{field}[{position}]"
            )
        intervals.append(pair)
    try:
        return IndexSet(intervals)
    except DomainError as exc:
        raise ProgramFileError(exc.message, field=field) from exc


def _as_row(value: Any, field: str) -> IndexSet:
    """Read a sparse row, given as indices or as intervals."""
    items = _as_list(value, field)
    if items and all(isinstance(item, list) for item in items):
        return _as_index_set(items, field)
    try:
        return IndexSet.from_elements(_as_int_list(items, field))
    except DomainError as exc:
        raise ProgramFileError(exc.message, field=field) from exc


def _kind(data: Mapping[str, Any], field: str, known: Mapping[str, Any]) -> str:
    kind = _as_str(_get(data, "kind", field), f"{field}.kind")
    if kind not in known:
        raise ProgramFileError(
            f"unknown kind `{kind}`, expected one of: {', '.join(sorted(known))}",
            field=f"{field}.kind",
        )
    return kind


def _parse_distribution(value: Any, size: int, field: str) -> Distribution:
    data = _as_mapping(value, field)
    kind = _kind(data, field, _DISTRIBUTIONS)
    if "N" in data and _as_int(data["N"], f"{field}.N") != size:
        raise ProgramFileError(
            f"the distribution is for {data['N']} indices but the object has {size}",
            field=f"{field}.N",
        )
    try:
        return _DISTRIBUTIONS[kind](data, size, field)
    except DomainError as exc:
        raise ProgramFileError(exc.message, field=field) from exc


def _nprocs(data: Mapping[str, Any], field: str) -> int:
    return _as_int(_get(data, "P", field), f"{field}.P", minimum=1)


def _parse_explicit(data: Mapping[str, Any], size: int, field: str) -> Distribution:
    sets_field = f"{field}.sets"
    sets = [
        _as_index_set(item, f"{sets_field}[{proc}]")
        for proc, item in enumerate(_as_list(_get(data, "sets", field), sets_field))
    ]
    if "P" in data and _nprocs(data, field) != len(sets):
        raise ProgramFileError(
            f"{data['P']} processors announced but {len(sets)} sets given", field=f"{field}.P"
        )
    return explicit_distribution(sets, size)


_DISTRIBUTIONS: Dict[str, Callable[[Mapping[str, Any], int, str], Distribution]] = {
    "block": lambda data, size, field: block_distribution(size, _nprocs(data, field)),
    "cyclic": lambda data, size, field: cyclic_distribution(size, _nprocs(data, field)),
    "replicated": lambda data, size, field: replicated_distribution(size, _nprocs(data, field)),
    "halo": lambda data, size, field: halo_distribution(
        size, _nprocs(data, field), _as_int(_get(data, "width", field), f"{field}.width", 0)
    ),
    "explicit": _parse_explicit,
}


def _parse_sparse(data: Mapping[str, Any], n_in: int, field: str) -> SignatureFunction:
    if "matrix" in data:
        matrix_field = f"{field}.matrix"
        matrix = [
            _as_int_list(line, f"{matrix_field}[{index}]")
            for index, line in enumerate(_as_list(data["matrix"], matrix_field))
        ]
        signature = SparseSignature.from_dense(matrix)
        if "n_in" in data and signature.n_in != n_in:
            raise ProgramFileError(
                f"the matrix has {signature.n_in} columns, not {n_in}", field=matrix_field
            )
        return signature

    rows_field = f"{field}.rows"
    rows_data = _get(data, "rows", field)
    rows: Dict[int, IndexSet] = {}
    if isinstance(rows_data, list):
        for index, row in enumerate(rows_data):
            rows[index] = _as_row(row, f"{rows_field}[{index}]")
    else:
        for key, row in _as_mapping(rows_data, rows_field).items():
            try:
                index = int(key)
            except ValueError:
                raise ProgramFileError(
                    f"`{key}` is not a row index", field=f"{rows_field}.{key}"
                ) from None
            rows[index] = _as_row(row, f"{rows_field}.{key}")
    return SparseSignature(rows, n_in)


_SIGNATURES: Dict[str, Callable[[Mapping[str, Any], int, str], SignatureFunction]] = {
    "stencil": lambda data, n_in, field: StencilSignature(
        _as_int_list(_get(data, "offsets", field), f"{field}.offsets"), n_in
    ),
    "affine": lambda data, n_in, field: AffineSignature(
        _as_int(_get(data, "stride", field), f"{field}.stride"),
        _as_int_list(_get(data, "offsets", field), f"{field}.offsets"),
        n_in,
    ),
    "sparse": _parse_sparse,
    "total": lambda data, n_in, field: TotalSignature(n_in),
}


def _parse_signature(value: Any, default_n_in: int, field: str) -> SignatureFunction:
    data = _as_mapping(value, field)
    kind = _kind(data, field, _SIGNATURES)
    n_in = _as_int(data.get("n_in", default_n_in), f"{field}.n_in", minimum=0)
    try:
        return _SIGNATURES[kind](data, n_in, field)
    except ProgramFileError:
        raise
    except HaloPlanException as exc:
        raise ProgramFileError(exc.message, field=field) from exc


def _parse_weights(data: Mapping[str, Any], field: str) -> Combiner:
    weights_field = f"{field}.weights"
    weights: Dict[int, Value] = {}
    for key, weight in _as_mapping(_get(data, "weights", field), weights_field).items():
        try:
            weights[int(key)] = parse_value(weight)
        except ValueError:
            raise ProgramFileError(
                f"offset `{key}` with weight {weight!r} is not valid",
                field=f"{weights_field}.{key}",
            ) from None
    return WeightedCombiner(weights)


_COMBINERS: Dict[str, Callable[[Mapping[str, Any], str], Combiner]] = {
    "sum": lambda data, field: SumCombiner(),
    "max": lambda data, field: MaxCombiner(),
    "weighted": _parse_weights,
}


def _parse_combiner(value: Any, field: str) -> Optional[Combiner]:
    if value is None:
        return None
    data = _as_mapping(value, field)
    return _COMBINERS[_kind(data, field, _COMBINERS)](data, field)


def parse_program(document: Any) -> Program:
    """Create a program from a decoded program file.

    Parameters
    ----------
    document : Any
        The decoded JSON document.

    Returns
    -------
    Program
        The well-formed program.

    Raises
    ------
    ProgramFileError
        If the document is not a valid program, with the path of the faulty field.

    Examples
    --------
    >>> from haloplan.loading import parse_program
    >>> program = parse_program({
    ...     "objects": [
    ...         {"name": "x", "N": 8, "distribution": {"kind": "block", "P": 2}},
    ...         {"name": "y", "N": 8, "distribution": {"kind": "cyclic", "P": 2}},
    ...     ],
    ...     "kernels": [
    ...         {"name": "copy", "input": "x", "output": "y",
    ...          "signature": {"kind": "stencil", "offsets": [0]}},
    ...     ],
    ... })
    >>> program
    <Program x -> y>

    """
    data = _as_mapping(document, "")
    program = Program()

    objects = _as_list(_get(data, "objects", ""), "objects")
    for position, item in enumerate(objects):
        field = f"objects[{position}]"
        declaration = _as_mapping(item, field)
        name = _as_str(_get(declaration, "name", field), f"{field}.name")
        size = _as_int(_get(declaration, "N", field), f"{field}.N", minimum=0)
        distribution = _parse_distribution(
            _get(declaration, "distribution", field), size, f"{field}.distribution"
        )
        try:
            program.add_object(name, distribution)
        except ProgramError as exc:
            raise ProgramFileError(exc.message, field=f"{field}.name") from exc

    kernels = _as_list(_get(data, "kernels", ""), "kernels")
    if not kernels:
        raise ProgramFileError("a program needs at least one kernel", field="kernels")
    for position, item in enumerate(kernels):
        field = f"kernels[{position}]"
        description = _as_mapping(item, field)
        name = _as_str(_get(description, "name", field), f"{field}.name")
        input_name = _as_str(_get(description, "input", field), f"{field}.input")
        output_name = _as_str(_get(description, "output", field), f"{field}.output")
        if input_name not in program.objects:
            raise ProgramFileError(
                f"object `{input_name}` is not declared", field=f"{field}.input"
            )
        signature = _parse_signature(
            _get(description, "signature", field),
            program.objects[input_name].size,
            f"{field}.signature",
        )
        combiner = _parse_combiner(description.get("combiner"), f"{field}.combiner")
        try:
            program.add_kernel(name, input_name, output_name, signature, combiner)
        except HaloPlanException as exc:
            raise ProgramFileError(exc.message, field=field) from exc

    logger.info("program loaded: %r", program)
    return program


def load_program(path: str) -> Program:
    """Read the program file at `path`.

    Parameters
    ----------
    path : str
        The path of the JSON program file.

    Returns
    -------
    Program
        The well-formed program.

    Raises
    ------
    ProgramFileError
        If the file cannot be read, is not valid JSON, or does not describe a valid program.

    """
    try:
        with open(path, "r") as file:
            content = file.read()
    except OSError as exc:
        raise ProgramFileError(f"cannot read `{path}`", from_exception=exc) from exc

    try:
        document = json.loads(content)
    except json.JSONDecodeError as exc:
        raise ProgramFileError(
            "invalid JSON", pos=(exc.lineno, exc.colno), from_exception=exc
        ) from exc

    return parse_program(document)


def program_to_document(prog: Program) -> Dict[str, Any]:
    """Return the program file document of `prog`, read back by ``parse_program``.

    Distributions are written as explicit ones.

    Parameters
    ----------
    prog : Program
        The program.

    Returns
    -------
    Dict[str, Any]
        The document, ready to be encoded in JSON.

    """
    return {
        "objects": [
            {
                "name": declaration.name,
                "N": declaration.size,
                "distribution": {
                    "kind": "explicit",
                    "sets": declaration.distribution.to_json()["sets"],
                },
            }
            for declaration in prog.objects.values()
        ],
        "kernels": [
            {
                "name": kernel.name,
                "input": kernel.input_name,
                "output": kernel.output_name,
                "signature": kernel.sigma.to_json(),
                "combiner": kernel.combiner.to_json(),
            }
            for kernel in prog.kernels
        ],
    }


def parse_values(text: str, source: str = "<values>") -> List[Value]:
    """Parse whitespace separated values.

    Parameters
    ----------
    text : str
        The values, integers or rationals like ``1/2``.
    source : str
        Where the text comes from, for error messages. Default to ``"<values>"``.

    Returns
    -------
    List[Value]
        The exact values.

    Raises
    ------
    DomainError
        If a token is not an integer or a rational.

    Examples
    --------
    >>> parse_values("1 -2\\n3/6")
    [1, -2, Fraction(1, 2)]

    """
    values: List[Value] = []
    for position, token in enumerate(text.split()):
        try:
            values.append(parse_value(token))
        except (ValueError, ZeroDivisionError):
            raise DomainError(
                f"{source}: value {position} `{token}` is not an integer or a rational"
            ) from None
    return values


def load_values(path: str) -> List[Value]:
    """Read the values file at `path`. See ``parse_values``.

    Raises
    ------
    DomainError
        If a value is not valid.
    OSError
        If the file cannot be read.

    """
    with open(path, "r") as file:
        return parse_values(file.read(), path)


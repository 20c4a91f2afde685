"""
State and decomposition file schemas

JSON files validated with pydantic:

    {"version": "1", "kind": "bipartite_ds", "d": 3,
     "entries": [{"i": 0, "j": 0, "w": 0.19}, ...], "normalized": false}

    {"version": "1", "kind": "multiqubit", "n": 5, "diag": [...], "sigma": 1.0}

Every failure surfaces as StateFileError with a line (JSON syntax) or a
field path (schema and domain checks).
"""

import json
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np

from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from core.errors import SeparabilityError, StateFileError
from core.states.decomp import ProductTerm, SeparableDecomposition
from core.states.ds_state import DsState, new_ds_state
from core.states.multiqubit import SymmetricNQubitState

FORMAT_VERSION = '1'


class WeightEntry(BaseModel):
    i: int
    j: int
    w: float


class BipartiteStateFile(BaseModel):
    version: str = FORMAT_VERSION
    kind: Literal['bipartite_ds']
    d: int
    entries: List[WeightEntry]
    normalized: bool = False


class MultiqubitStateFile(BaseModel):
    version: str = FORMAT_VERSION
    kind: Literal['multiqubit']
    n: int
    diag: List[float]
    sigma: float = 0.0
    normalization: float = 1.0
    coherence_pair: Optional[Tuple[int, int]] = None
    z: Optional[float] = None


StateFile = Annotated[Union[BipartiteStateFile, MultiqubitStateFile], Field(discriminator='kind')]


class TermEntry(BaseModel):
    w: float
    ket: List[Tuple[float, float]]  # (real, imag) per component


class DecompositionFile(BaseModel):
    version: str = FORMAT_VERSION
    kind: Literal['decomposition'] = 'decomposition'
    d: int
    route: str
    terms: List[TermEntry]


_STATE_ADAPTER = TypeAdapter(StateFile)


def _read_json(path: Union[str, Path]) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise StateFileError(f"Cannot read {path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFileError(f"Invalid JSON in {path}: {e.msg}", location=f"line {e.lineno}") from e


def _first_error(e: ValidationError) -> StateFileError:
    error = e.errors()[0]
    location = '.'.join(str(part) for part in error['loc'])
    return StateFileError(f"{error['msg']}", location=location or None)


def parse_state(data: dict) -> Union[DsState, SymmetricNQubitState]:
    """Validate a decoded state file and build the state it describes."""
    if data.get('version', FORMAT_VERSION) != FORMAT_VERSION:
        raise StateFileError(f"Unsupported format version {data.get('version')!r}", location='version')
    try:
        model = _STATE_ADAPTER.validate_python(data)
    except ValidationError as e:
        raise _first_error(e) from e

    try:
        if isinstance(model, BipartiteStateFile):
            weights = {}
            for entry in model.entries:
                key = (min(entry.i, entry.j), max(entry.i, entry.j))
                weights[key] = weights.get(key, 0.0) + entry.w
            return new_ds_state(model.d, weights, normalized=model.normalized)
        return SymmetricNQubitState(
            n_qubits=model.n,
            diag=tuple(model.diag),
            coherence=model.sigma,
            normalization=model.normalization,
            coherence_pair=model.coherence_pair,
            z_param=model.z,
        )
    except SeparabilityError as e:
        field_name = 'entries' if isinstance(model, BipartiteStateFile) else 'diag'
        raise StateFileError(str(e), location=field_name) from e


def load_state(path: Union[str, Path]) -> Union[DsState, SymmetricNQubitState]:
    return parse_state(_read_json(path))


def state_to_dict(state: Union[DsState, SymmetricNQubitState]) -> dict:
    if isinstance(state, DsState):
        return {
            'version': FORMAT_VERSION,
            'kind': 'bipartite_ds',
            'd': state.d,
            'entries': [{'i': i, 'j': j, 'w': w} for (i, j), w in sorted(state.weights.items())],
            'normalized': state.normalized,
        }
    data = {
        'version': FORMAT_VERSION,
        'kind': 'multiqubit',
        'n': state.n_qubits,
        'diag': list(state.diag),
        'sigma': state.coherence,
        'normalization': state.normalization,
        'coherence_pair': list(state.coherence_pair),
    }
    if state.z_param is not None:
        data['z'] = state.z_param
    return data


def decomposition_to_dict(dec: SeparableDecomposition) -> dict:
    return {
        'version': FORMAT_VERSION,
        'kind': 'decomposition',
        'd': dec.d,
        'route': dec.route,
        'terms': [
            {'w': term.weight, 'ket': [[float(c.real), float(c.imag)] for c in term.ket]}
            for term in dec.terms
        ],
    }


def parse_decomposition(data: dict) -> SeparableDecomposition:
    try:
        model = DecompositionFile.model_validate(data)
    except ValidationError as e:
        raise _first_error(e) from e
    try:
        terms = [
            ProductTerm(weight=term.w, ket=np.array([complex(re, im) for re, im in term.ket], dtype=complex))
            for term in model.terms
        ]
    except SeparabilityError as e:
        raise StateFileError(str(e), location='terms') from e
    if any(len(t.ket) != model.d for t in terms):
        raise StateFileError(f"Every ket must have {model.d} components", location='terms')
    return SeparableDecomposition(d=model.d, terms=terms, route=model.route)


def load_decomposition(path: Union[str, Path]) -> SeparableDecomposition:
    return parse_decomposition(_read_json(path))
